#pragma once

#include <stdexcept>
#include <string>

namespace sq {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SQ_DEFINE_ERROR(Name)              \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

SQ_DEFINE_ERROR(RankDeficient);
SQ_DEFINE_ERROR(DimensionMismatch);
SQ_DEFINE_ERROR(SingularMap);
SQ_DEFINE_ERROR(NonFiniteGauge);
SQ_DEFINE_ERROR(Degenerate);
SQ_DEFINE_ERROR(UnsupportedRepresentation);
SQ_DEFINE_ERROR(InnerContainmentFailed);
SQ_DEFINE_ERROR(WitnessViolated);
SQ_DEFINE_ERROR(BoundViolated);
SQ_DEFINE_ERROR(FrameMismatch);
SQ_DEFINE_ERROR(InvalidArgument);

#undef SQ_DEFINE_ERROR

// Thrown when no acceptable subspace was found; carries the best estimate seen.
class SearchExhausted : public Error {
 public:
  SearchExhausted(const std::string& what, double best_value, int tries)
      : Error(what), best_value_(best_value), tries_(tries) {}
  double best_value() const { return best_value_; }
  int tries() const { return tries_; }

 private:
  double best_value_;
  int tries_;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace sq
