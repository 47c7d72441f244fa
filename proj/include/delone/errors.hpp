#pragma once

#include <stdexcept>
#include <string>

namespace delone {

/// Base of every error raised by the library. `kind()` is the stable name
/// used in CLI messages and JSON reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define DELONE_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

DELONE_DEFINE_ERROR(ParseError)
DELONE_DEFINE_ERROR(DuplicatePoint)
DELONE_DEFINE_ERROR(CapacityError)
DELONE_DEFINE_ERROR(EmptyInput)
DELONE_DEFINE_ERROR(DomainError)
DELONE_DEFINE_ERROR(AmbiguousFloor)
DELONE_DEFINE_ERROR(RangeError)
DELONE_DEFINE_ERROR(AlignmentError)
DELONE_DEFINE_ERROR(InfeasibleQuota)
DELONE_DEFINE_ERROR(ScheduleError)
DELONE_DEFINE_ERROR(DegenerateInput)
DELONE_DEFINE_ERROR(InsufficientData)
DELONE_DEFINE_ERROR(CapExceeded)
DELONE_DEFINE_ERROR(PreconditionError)
DELONE_DEFINE_ERROR(ShapeError)
DELONE_DEFINE_ERROR(StateError)

#undef DELONE_DEFINE_ERROR

}  // namespace delone
