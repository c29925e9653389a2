#pragma once

#include <optional>

namespace hexvessel {

/// Thread count from an explicit request, else HEXVESSEL_THREADS, else the
/// OpenMP default. Applies it with omp_set_num_threads and returns it.
int configure_threads(std::optional<int> requested = std::nullopt);

int max_threads();

}  // namespace hexvessel
