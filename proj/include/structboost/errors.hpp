#pragma once

#include <stdexcept>
#include <string>

namespace structboost {

// Base of every error raised by the library. Subclasses name the failure kind
// so callers (and the CLI) can report it without parsing messages.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "Error"; }
};

#define STRUCTBOOST_ERROR(Name)                                   \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(what) {}       \
    const char* kind() const noexcept override { return #Name; }  \
  }

STRUCTBOOST_ERROR(ParseError);
STRUCTBOOST_ERROR(ValidationError);
STRUCTBOOST_ERROR(WidthMismatch);
STRUCTBOOST_ERROR(EdgeNotFound);
STRUCTBOOST_ERROR(ResourceLimit);
STRUCTBOOST_ERROR(InvalidConfig);
STRUCTBOOST_ERROR(InconsistentState);
STRUCTBOOST_ERROR(UnknownCategory);
STRUCTBOOST_ERROR(MissingValue);
STRUCTBOOST_ERROR(MissingTarget);
STRUCTBOOST_ERROR(DegenerateTarget);
STRUCTBOOST_ERROR(SchemaMismatch);
STRUCTBOOST_ERROR(AurocUndefined);
STRUCTBOOST_ERROR(InsufficientData);
STRUCTBOOST_ERROR(InvalidScenario);

#undef STRUCTBOOST_ERROR

}  // namespace structboost
