#pragma once

#include <stdexcept>
#include <string>

namespace hexvessel {

// Input problems (bad geometry, bad parameters) derive from InputError;
// failures of the meshing pipeline on valid input derive from MeshingError.
// The CLI maps the two families to distinct exit codes.

class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class MeshingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DomainError : public InputError {
public:
  using InputError::InputError;
};

class ParameterError : public InputError {
public:
  using InputError::InputError;
};

class SplineError : public InputError {
public:
  using InputError::InputError;
};

class SingularFitError : public InputError {
public:
  using InputError::InputError;
};

class InvalidProfileError : public InputError {
public:
  using InputError::InputError;
};

class DegeneratePathError : public InputError {
public:
  using InputError::InputError;
};

class MisalignedTangentError : public InputError {
public:
  using InputError::InputError;
};

class ConvexityError : public InputError {
public:
  using InputError::InputError;
};

class TopologyError : public InputError {
public:
  using InputError::InputError;
};

class SchemaError : public InputError {
public:
  using InputError::InputError;
};

class OrientationError : public MeshingError {
public:
  using MeshingError::MeshingError;
};

class DegenerateJunctionError : public MeshingError {
public:
  using MeshingError::MeshingError;
};

class FoldError : public MeshingError {
public:
  using MeshingError::MeshingError;
};

class TemplateError : public MeshingError {
public:
  using MeshingError::MeshingError;
};

class SweepError : public MeshingError {
public:
  using MeshingError::MeshingError;
};

class BlendError : public MeshingError {
public:
  using MeshingError::MeshingError;
};

class ConformalityError : public MeshingError {
public:
  using MeshingError::MeshingError;
};

}  // namespace hexvessel
