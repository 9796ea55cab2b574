#ifndef LDFT_TYPES_HPP
#define LDFT_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ldft {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Base for every solver error; subtypes carry the failure site in what().
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define LDFT_DEFINE_ERROR(NAME)                                     \
  class NAME : public Error {                                       \
  public:                                                           \
    explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
  }

LDFT_DEFINE_ERROR(SingularDH);
LDFT_DEFINE_ERROR(SingularDG);
LDFT_DEFINE_ERROR(ComplexSpectrum);
LDFT_DEFINE_ERROR(HypothesisViolated);
LDFT_DEFINE_ERROR(UnknownSystem);
LDFT_DEFINE_ERROR(EmptyDomain);
LDFT_DEFINE_ERROR(DomainMismatch);
LDFT_DEFINE_ERROR(LeftBall);
LDFT_DEFINE_ERROR(CurveStiff);
LDFT_DEFINE_ERROR(NoConvergence);
LDFT_DEFINE_ERROR(BadBoundaryMap);
LDFT_DEFINE_ERROR(BudgetExceeded);
LDFT_DEFINE_ERROR(BallEscape);
LDFT_DEFINE_ERROR(EventOverflow);
LDFT_DEFINE_ERROR(EpsilonBudgetBlown);
LDFT_DEFINE_ERROR(OutOfDomain);
LDFT_DEFINE_ERROR(InterfaceMismatch);
LDFT_DEFINE_ERROR(TimeTooShort);
LDFT_DEFINE_ERROR(RankCondition);
LDFT_DEFINE_ERROR(NoEntropyPair);
LDFT_DEFINE_ERROR(NoOracle);
LDFT_DEFINE_ERROR(SupportViolation);
LDFT_DEFINE_ERROR(ConfigError);

#undef LDFT_DEFINE_ERROR

}  // namespace ldft

#endif
