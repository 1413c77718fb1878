#pragma once

#include <stdexcept>
#include <string>

namespace eutherm {

// Typed failures. Admissible-set violations throw instead of clamping so that
// a bad state cannot silently leak into the structural certificates.

struct SingularTensor : std::runtime_error {
  explicit SingularTensor(const std::string& what) : std::runtime_error(what) {}
};

struct NonpositiveTemperature : std::runtime_error {
  explicit NonpositiveTemperature(const std::string& what) : std::runtime_error(what) {}
};

struct NonpositiveHeatCapacity : std::runtime_error {
  explicit NonpositiveHeatCapacity(const std::string& what) : std::runtime_error(what) {}
};

struct RootFindFailure : std::runtime_error {
  explicit RootFindFailure(const std::string& what) : std::runtime_error(what) {}
};

struct GridMismatch : std::runtime_error {
  explicit GridMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateEntropySlope : std::runtime_error {
  explicit DegenerateEntropySlope(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateEnergySlope : std::runtime_error {
  explicit DegenerateEnergySlope(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct BadParameters : std::runtime_error {
  explicit BadParameters(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct BlowUp : std::runtime_error {
  explicit BlowUp(const std::string& what) : std::runtime_error(what) {}
};

struct Inadmissible : std::runtime_error {
  explicit Inadmissible(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace eutherm
