#include "hexvessel/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

#include "hexvessel/error.hpp"

namespace hexvessel {

int configure_threads(std::optional<int> requested) {
  int n = 0;
  if (requested) {
    n = *requested;
  } else if (const char* env = std::getenv("HEXVESSEL_THREADS"); env && *env) {
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
      throw ParameterError(std::string("HEXVESSEL_THREADS is not an integer: ") + env);
    }
  } else {
    n = omp_get_num_procs();
  }
  if (n < 1) throw ParameterError("thread count must be at least 1");
  omp_set_num_threads(n);
  return n;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace hexvessel
