#pragma once

#include <stdexcept>
#include <string>

namespace tracebound {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TRACEBOUND_ERROR(Name)                  \
  class Name : public Error {                   \
   public:                                      \
    using Error::Error;                         \
  }

TRACEBOUND_ERROR(InvalidArgument);
TRACEBOUND_ERROR(ParseError);
TRACEBOUND_ERROR(NonSquarefree);
TRACEBOUND_ERROR(DuplicateNode);
TRACEBOUND_ERROR(NoConvergence);
TRACEBOUND_ERROR(SingularSystem);
TRACEBOUND_ERROR(AlphaOnSupport);
TRACEBOUND_ERROR(RootOnSupport);
TRACEBOUND_ERROR(GapRootMismatch);
TRACEBOUND_ERROR(NegativeDensity);
TRACEBOUND_ERROR(DegenerateLeftEndpoint);
TRACEBOUND_ERROR(NoRoot);
TRACEBOUND_ERROR(Stalled);
TRACEBOUND_ERROR(RootOutOfRange);
TRACEBOUND_ERROR(MultipleRootsInGap);

#undef TRACEBOUND_ERROR

}  // namespace tracebound
