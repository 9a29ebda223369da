#include "wetting/params.hpp"

#include <algorithm>
#include <cmath>

namespace wetting {

CriticalParams params_from_q(double q) {
  if (!(q > 4.0)) throw DomainError("params_from_q: need q > 4");
  CriticalParams cp;
  cp.q = q;
  const double sq = std::sqrt(q);
  cp.p = sq / (1.0 + sq);
  cp.lambda = std::acosh(sq / 2.0);
  cp.c = 2.0 * std::cosh(cp.lambda / 2.0);
  cp.c_b = std::exp(cp.lambda / 2.0);
  cp.J = 0.5 * std::atanh(1.0 / cp.c);
  cp.U = -0.5 * std::log(std::sinh(2.0 * cp.J));
  cp.w_tau = std::exp(2.0 * cp.U) * (std::exp(2.0 * cp.J) - std::exp(-2.0 * cp.J));
  cp.w_tautau = std::exp(2.0 * (cp.U - cp.J)) - 1.0;
  cp.qb_free = std::exp(cp.lambda) * sq;
  cp.qb_wired = std::exp(-cp.lambda) * sq;
  return cp;
}

double CriticalParams::clockwise_threshold() const { return std::exp(lambda) / std::sqrt(q); }

double CriticalParams::split_threshold() const { return std::exp(lambda / 2.0) / c; }

double params_max_violation(const CriticalParams& cp) {
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  const double sq = std::sqrt(cp.q);
  double v = 0;
  v = std::max(v, rel(cp.p, sq / (1 + sq)));
  v = std::max(v, rel(std::exp(cp.lambda) + std::exp(-cp.lambda), sq));
  v = std::max(v, rel(cp.c, std::exp(cp.lambda / 2) + std::exp(-cp.lambda / 2)));
  v = std::max(v, rel(cp.c * cp.c, sq + 2));
  v = std::max(v, rel(1.0 / std::tanh(2 * cp.J), cp.c));
  v = std::max(v, rel(std::sinh(2 * cp.J), std::exp(-2 * cp.U)));
  v = std::max(v, rel(cp.c_b, std::exp(cp.lambda / 2)));
  v = std::max(v, rel(cp.w_tau, std::exp(2 * cp.U) * (std::exp(2 * cp.J) - std::exp(-2 * cp.J))));
  v = std::max(v, rel(cp.w_tautau, std::exp(2 * (cp.U - cp.J)) - 1));
  v = std::max(v, rel(cp.qb_free, std::exp(cp.lambda) * sq));
  v = std::max(v, rel(cp.qb_wired, std::exp(-cp.lambda) * sq));
  if (!(cp.U > cp.J && cp.J > 0)) v = std::max(v, 1.0);
  return v;
}

}  // namespace wetting
