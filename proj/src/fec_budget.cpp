#include "mgdm/fec_budget.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mgdm {

void FecSpec::validate() const {
  if (b < 2 || b > 16) throw std::invalid_argument("fec.b must lie in [2, 16]");
  if (!(0 < k && k < n)) throw std::invalid_argument("fec requires 0 < k < n");
  if (n > (1 << b) - 1) throw std::invalid_argument("fec.n must be <= 2^b - 1");
  if (t() < 1) throw std::invalid_argument("fec requires t >= 1");
}

double overhead(const FecSpec& spec) {
  spec.validate();
  return double(spec.n - spec.k) / double(spec.k);
}

double binomial_tail_above(int n, int t, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial tail: p out of range");
  if (t >= n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lgn = std::lgamma(n + 1.0);
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  terms.reserve(n - t);
  for (int i = t + 1; i <= n; ++i) {
    const double lt = lgn - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                      i * lp + (n - i) * lq;
    terms.push_back(lt);
    max_term = std::max(max_term, lt);
  }
  double sum = 0.0;
  for (double lt : terms) sum += std::exp(lt - max_term);
  return std::min(1.0, std::exp(max_term) * sum);
}

double post_fec_bound(double pre_ber, const FecSpec& spec) {
  spec.validate();
  if (!(pre_ber >= 0.0 && pre_ber <= 0.5))
    throw std::invalid_argument("post_fec_bound: pre_ber must lie in [0, 0.5]");
  const double ps = 1.0 - std::pow(1.0 - pre_ber, spec.b);
  return binomial_tail_above(spec.n, spec.t(), ps);
}

double net_bit_rate(int lanes, double lane_rate, double oh) {
  if (lanes <= 0 || !(lane_rate > 0) || !(oh >= 0))
    throw std::invalid_argument("net_bit_rate: arguments must be positive");
  // code overheads are small rationals (n - k) / k; recover p/q by continued
  // fractions so e.g. oh = 0.12 divides out without a rounding residue
  double x = oh;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int i = 0; i < 32 && q1 <= 4096; ++i) {
    const double a = std::floor(x);
    const long long ai = static_cast<long long>(a);
    const long long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    if (q1 > 0 && std::abs(oh - double(p1) / double(q1)) <= 1e-12 * (1.0 + oh))
      return lanes * lane_rate * double(q1) / double(q1 + p1);
    const double frac = x - a;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  return lanes * lane_rate / (1.0 + oh);
}

}  // namespace mgdm
