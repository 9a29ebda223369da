#pragma once

#include <stdexcept>

namespace wetting {

struct CriticalParams {
  double q = 0;
  double p = 0;
  double lambda = 0;
  double c = 0;    // bulk six-vertex weight
  double c_b = 0;  // boundary weight
  double J = 0;
  double U = 0;
  double w_tau = 0;
  double w_tautau = 0;
  double qb_free = 0;
  double qb_wired = 0;

  // Thresholds used by the coupling chain.
  double clockwise_threshold() const;  // e^lambda / sqrt(q)
  double split_threshold() const;      // e^{lambda/2} / c
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

CriticalParams params_from_q(double q);

// Largest relative violation among the algebraic relations.
double params_max_violation(const CriticalParams& cp);

}  // namespace wetting
