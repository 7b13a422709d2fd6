#pragma once

#include <stdexcept>

namespace sigma345 {

// Every failure mode gets its own type so callers can react precisely and
// test harnesses can assert that the right guard fired.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotNumerical : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BranchPointProximity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutOfChart : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChartFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepCollapse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HomologyRankFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DiagonalPole : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CharacteristicNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CalibrationInconsistent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OnThetaDivisor : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularDivisor : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BranchDegeneracy : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sigma345
