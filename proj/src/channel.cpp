#include "mgdm/channel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "mgdm/fft.hpp"
#include "mgdm/rng.hpp"

namespace mgdm {

namespace {

using Complex = std::complex<double>;

void MGDM_CHECK(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Complex std_complex_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng), im = n(rng);
  return Complex(re, im) / std::numbers::sqrt2;
}

// Haar-distributed unitary: complex Ginibre, QR, R-diagonal phase fix.
Eigen::MatrixXcd haar_unitary(int n, std::mt19937_64& rng) {
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = std_complex_normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    q.col(j) *= (std::abs(d) > 0) ? d / std::abs(d) : 1.0;
  }
  return q;
}

// Entry variances t_q for the raw inter-group perturbation, per column group,
// chosen so that after the polar projection every excited group leaks the
// target power: (N - n_q) t_q + sum_{p != q} n_p t_p = 4 * xt_lin.
Eigen::VectorXd solve_leak_variances(const std::vector<int>& sizes, int n_total,
                                     double xt_lin) {
  const int g = static_cast<int>(sizes.size());
  Eigen::MatrixXd m(g, g);
  for (int q = 0; q < g; ++q)
    for (int p = 0; p < g; ++p)
      m(q, p) = (p == q) ? double(n_total - sizes[q]) : double(sizes[p]);
  const Eigen::VectorXd t =
      m.colPivHouseholderQr().solve(Eigen::VectorXd::Constant(g, 4.0 * xt_lin));
  return t.cwiseMax(0.0);
}

}  // namespace

void CrosstalkSpec::validate() const {
  if (!(xt_db <= 0.0)) throw std::invalid_argument("crosstalk.xt_db must be <= 0");
  if (!(drift_sigma >= 0.0)) throw std::invalid_argument("crosstalk.drift_sigma must be >= 0");
}

ChannelRealization draw_block_channel(const CrosstalkSpec& spec, const FiberSpec& fiber,
                                      const ModeBasis& basis, int block_index) {
  spec.validate();
  MGDM_CHECK(!basis.groups.empty(), "channel: basis has no groups");
  MGDM_CHECK(block_index >= 0, "channel: block_index must be >= 0");

  const int n = basis.size();
  const int n_groups = static_cast<int>(basis.groups.size());
  std::vector<int> sizes, offsets;
  int off = 0;
  for (const ModeGroup& g : basis.groups) {
    sizes.push_back(static_cast<int>(g.members.size()));
    offsets.push_back(off);
    off += sizes.back();
  }

  // strong intra-group mixing, redrawn every block
  Eigen::MatrixXcd q0 = Eigen::MatrixXcd::Zero(n, n);
  for (int g = 0; g < n_groups; ++g) {
    auto rng = make_engine(derive_seed(
        spec.seed, {stream::kIntraGroup, std::uint64_t(block_index), std::uint64_t(g)}));
    q0.block(offsets[g], offsets[g], sizes[g], sizes[g]) = haar_unitary(sizes[g], rng);
  }

  const double xt_lin = std::isinf(spec.xt_db) ? 0.0 : std::pow(10.0, spec.xt_db / 10.0);
  Eigen::MatrixXcd h = q0;
  if (xt_lin > 0.0 && n_groups > 1) {
    const Eigen::VectorXd t = solve_leak_variances(sizes, n, xt_lin);

    // static part plus a per-block perturbation; drift_sigma blends between a
    // frozen coupling (0) and a fresh redraw each block (large)
    auto static_rng = make_engine(derive_seed(spec.seed, {stream::kInterStatic}));
    Eigen::MatrixXcd z(n, n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) z(j, k) = std_complex_normal(static_rng);

    const double kappa = spec.drift_sigma;
    const double blend = 1.0 / std::sqrt(1.0 + kappa * kappa);
    if (spec.random_walk) {
      for (int b = 0; b <= block_index; ++b) {
        auto rng = make_engine(derive_seed(spec.seed, {stream::kInterDrift, std::uint64_t(b)}));
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            z(j, k) = (z(j, k) + kappa * std_complex_normal(rng)) * blend;
      }
    } else {
      auto rng = make_engine(
          derive_seed(spec.seed, {stream::kInterDrift, std::uint64_t(block_index)}));
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          z(j, k) = (z(j, k) + kappa * std_complex_normal(rng)) * blend;
    }

    Eigen::MatrixXcd a = q0;
    for (int gq = 0; gq < n_groups; ++gq) {
      const double s = std::sqrt(t[gq]);
      for (int k = offsets[gq]; k < offsets[gq] + sizes[gq]; ++k)
        for (int j = 0; j < n; ++j)
          if (basis.mode_group[j] != basis.mode_group[k]) a(j, k) += s * z(j, k);
    }
    // nearest unitary (polar factor): exact energy conservation
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    h = svd.matrixU() * svd.matrixV().adjoint();
  }

  ChannelRealization real;
  real.block_index = block_index;
  for (const ModeGroup& g : basis.groups) {
    const double beta = propagation_constant(g.order, fiber);
    real.group_delay_s[g.order] = group_delay(g.order, fiber) * fiber.L;
    const Complex phase = std::polar(1.0, std::fmod(beta * fiber.L, 2.0 * std::numbers::pi));
    const int g_idx = int(&g - basis.groups.data());
    for (int k = offsets[g_idx]; k < offsets[g_idx] + sizes[g_idx]; ++k)
      h.col(k) *= phase;
  }

  real.H.m = std::move(h);
  for (const LpMode& mode : basis.modes) {
    real.H.in_labels.push_back(to_string(mode));
    real.H.out_labels.push_back(to_string(mode));
  }
  return real;
}

namespace {

Eigen::VectorXcd fractional_delay(const Eigen::VectorXcd& x, double rate, double delay_s) {
  if (delay_s == 0.0) return x;
  const Eigen::Index n = x.size();
  Eigen::VectorXcd spec = Fft::forward(x);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double kk = (k <= n / 2) ? double(k) : double(k) - double(n);
    const double f = kk * rate / double(n);
    spec[k] *= std::polar(1.0, -2.0 * std::numbers::pi * f * delay_s);
  }
  return Fft::inverse(spec);
}

}  // namespace

std::vector<Waveform> propagate(const std::vector<Waveform>& modes,
                                const ChannelRealization& real, const ModeBasis& basis) {
  MGDM_CHECK(static_cast<int>(modes.size()) == basis.size(),
             "propagate: one waveform per basis mode required");
  MGDM_CHECK(!modes.empty(), "propagate: empty input");
  const double rate = modes[0].rate;
  const Eigen::Index len = modes[0].samples.size();
  for (const Waveform& w : modes)
    MGDM_CHECK(w.rate == rate && w.samples.size() == len,
               "propagate: waveforms must share rate and length");

  const int n = basis.size();
  std::vector<Eigen::VectorXcd> delayed(n);
  std::vector<bool> active(n, false);
  for (int k = 0; k < n; ++k) {
    if (modes[k].samples.isZero(0.0)) continue;  // skip silent modes
    active[k] = true;
    delayed[k] = fractional_delay(modes[k].samples, rate,
                                  real.group_delay_s.at(basis.mode_group[k]));
  }

  std::vector<Waveform> out(n);
  for (int j = 0; j < n; ++j) {
    out[j].rate = rate;
    out[j].samples = Eigen::VectorXcd::Zero(len);
    for (int k = 0; k < n; ++k)
      if (active[k] && real.H.m(j, k) != std::complex<double>(0.0))
        out[j].samples += real.H.m(j, k) * delayed[k];
  }
  return out;
}

std::vector<Waveform> add_optical_noise(std::vector<Waveform> modes, double osnr_db,
                                        std::uint64_t seed) {
  if (std::isinf(osnr_db)) return modes;
  double power = 0.0;
  Eigen::Index count = 0;
  for (const Waveform& w : modes) {
    power += w.samples.squaredNorm();
    count += w.samples.size();
  }
  const double sigma =
      std::sqrt(power / double(count) / std::pow(10.0, osnr_db / 10.0) / 2.0);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    auto rng = make_engine(derive_seed(seed, {stream::kOpticalNoise, k}));
    std::normal_distribution<double> n(0.0, sigma);
    for (Eigen::Index i = 0; i < modes[k].samples.size(); ++i)
      modes[k].samples[i] += std::complex<double>(n(rng), n(rng));
  }
  return modes;
}

}  // namespace mgdm
