#pragma once

#include <stdexcept>
#include <string>

namespace lortz {

// Base class for anything this library can throw. Messages name the
// module and the offending quantity so CLI output stays actionable.
class LortzError : public std::runtime_error {
public:
  explicit LortzError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public LortzError {
public:
  using LortzError::LortzError;
};

class PointOutsideDomain : public LortzError {
public:
  using LortzError::LortzError;
};

class PeriodOutOfRange : public LortzError {
public:
  using LortzError::LortzError;
};

class OrbitNotClosed : public LortzError {
public:
  using LortzError::LortzError;
};

class LeftDomain : public LortzError {
public:
  using LortzError::LortzError;
};

class GaugeDegenerate : public LortzError {
public:
  using LortzError::LortzError;
};

class CutFieldRequiresJump : public LortzError {
public:
  using LortzError::LortzError;
};

class CutMismatch : public LortzError {
public:
  using LortzError::LortzError;
};

class SolverDiverged : public LortzError {
public:
  using LortzError::LortzError;
};

class IncompatibleData : public LortzError {
public:
  using LortzError::LortzError;
};

class DivergenceDetected : public LortzError {
public:
  using LortzError::LortzError;
};

class VersionMismatch : public LortzError {
public:
  using LortzError::LortzError;
};

class HashMismatch : public LortzError {
public:
  using LortzError::LortzError;
};

}  // namespace lortz
