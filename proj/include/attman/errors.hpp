#pragma once

#include <stdexcept>
#include <string>

namespace attman {

/// Base class for every numerical or domain failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ATTMAN_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

ATTMAN_DEFINE_ERROR(InvalidState);
ATTMAN_DEFINE_ERROR(NotSkew);
ATTMAN_DEFINE_ERROR(BadGains);
ATTMAN_DEFINE_ERROR(BadParams);
ATTMAN_DEFINE_ERROR(StepTooLarge);
ATTMAN_DEFINE_ERROR(NewtonDiverged);
ATTMAN_DEFINE_ERROR(NoConvergence);
ATTMAN_DEFINE_ERROR(AmbiguousMode);
ATTMAN_DEFINE_ERROR(EmptySubspace);
ATTMAN_DEFINE_ERROR(RankDeficient);
ATTMAN_DEFINE_ERROR(BadRadius);
ATTMAN_DEFINE_ERROR(TimeNotStored);
ATTMAN_DEFINE_ERROR(IoError);

#undef ATTMAN_DEFINE_ERROR

}  // namespace attman
