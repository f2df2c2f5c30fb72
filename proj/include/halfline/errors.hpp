#pragma once

#include <stdexcept>
#include <string>

namespace halfline {

/// Base class of every error raised by the toolkit. `module()` names the
/// pipeline stage that raised it so the CLI can report provenance.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

#define HALFLINE_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    using Error::Error;                                               \
  };

HALFLINE_DEFINE_ERROR(DomainError)
HALFLINE_DEFINE_ERROR(DataError)
HALFLINE_DEFINE_ERROR(StiffnessError)
HALFLINE_DEFINE_ERROR(IterationError)
HALFLINE_DEFINE_ERROR(ConditioningError)
HALFLINE_DEFINE_ERROR(CoverageError)
HALFLINE_DEFINE_ERROR(UnsupportedError)
HALFLINE_DEFINE_ERROR(AccuracyError)
HALFLINE_DEFINE_ERROR(NumericalError)
HALFLINE_DEFINE_ERROR(ConfigError)

#undef HALFLINE_DEFINE_ERROR

}  // namespace halfline
