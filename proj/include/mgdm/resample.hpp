#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace mgdm {

// Band-limited rational-ratio resampler: windowed-sinc interpolation with the
// cutoff at the lower of the two Nyquist frequencies. Samples outside the
// input are treated as zero. Tap vectors are cached per fractional phase when
// the rate ratio reduces to a small rational, which it does for all scope and
// bit-rate combinations used here.
class SincResampler {
 public:
  explicit SincResampler(double fs_in, double fs_out, int half_taps = 24)
      : fs_in_(fs_in), fs_out_(fs_out), half_taps_(half_taps) {
    if (fs_in <= 0 || fs_out <= 0) throw std::invalid_argument("resampler: rates must be positive");
    cutoff_ = std::min(1.0, fs_out / fs_in);  // relative to fs_in
    // try to express fs_in/fs_out as a reduced rational for phase caching
    const auto a = static_cast<std::int64_t>(std::llround(fs_in));
    const auto b = static_cast<std::int64_t>(std::llround(fs_out));
    if (a > 0 && b > 0 && std::abs(fs_in - double(a)) < 1e-6 && std::abs(fs_out - double(b)) < 1e-6) {
      const std::int64_t g = std::gcd(a, b);
      num_ = a / g;
      den_ = b / g;
      if (den_ > (1 << 16)) { num_ = den_ = 0; }  // too many phases to cache
    }
  }

  // n_out samples of x (at fs_in) resampled to fs_out, starting at time 0.
  Eigen::VectorXd apply(const Eigen::VectorXd& x, Eigen::Index n_out) const {
    Eigen::VectorXd y(n_out);
    const Eigen::Index n_in = x.size();
    std::vector<double> taps;
    for (Eigen::Index n = 0; n < n_out; ++n) {
      double pos;
      std::int64_t base;
      double frac;
      if (den_ > 0) {
        const std::int64_t p = n * num_;
        base = p / den_;
        frac = double(p % den_) / double(den_);
        pos = double(base) + frac;
      } else {
        pos = double(n) * fs_in_ / fs_out_;
        base = static_cast<std::int64_t>(std::floor(pos));
        frac = pos - double(base);
      }
      const double* h;
      if (den_ > 0) {
        h = cached_taps(static_cast<std::int64_t>((n * num_) % den_), frac);
      } else {
        make_taps(frac, taps);
        h = taps.data();
      }
      double acc = 0.0;
      const std::int64_t k0 = base - half_taps_ + 1;
      const std::int64_t k1 = base + half_taps_;
      const std::int64_t lo = std::max<std::int64_t>(k0, 0);
      const std::int64_t hi = std::min<std::int64_t>(k1, n_in - 1);
      for (std::int64_t k = lo; k <= hi; ++k) acc += x[k] * h[k - k0];
      y[n] = acc;
    }
    return y;
  }

 private:
  void make_taps(double frac, std::vector<double>& h) const {
    const int len = 2 * half_taps_;
    h.assign(len, 0.0);
    if (frac == 0.0 && cutoff_ == 1.0) {  // integer phase, no band limiting
      h[half_taps_ - 1] = 1.0;
      return;
    }
    double sum = 0.0;
    for (int i = 0; i < len; ++i) {
      // tap i multiplies x[base - half_taps + 1 + i]; offset from pos:
      const double t = double(i - half_taps_ + 1) - frac;
      const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * t / double(half_taps_)));
      h[i] = cutoff_ * sinc(cutoff_ * t) * window;
      sum += h[i];
    }
    // unity DC gain; also makes the integer-phase case an exact passthrough
    for (double& v : h) v /= sum;
  }

  const double* cached_taps(std::int64_t phase, double frac) const {
    auto it = cache_.find(phase);
    if (it == cache_.end()) {
      std::vector<double> h;
      make_taps(frac, h);
      it = cache_.emplace(phase, std::move(h)).first;
    }
    return it->second.data();
  }

  static double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
  }

  double fs_in_, fs_out_, cutoff_;
  int half_taps_;
  std::int64_t num_ = 0, den_ = 0;
  mutable std::unordered_map<std::int64_t, std::vector<double>> cache_;
};

inline Eigen::VectorXd resample(const Eigen::VectorXd& x, double fs_in, double fs_out,
                                Eigen::Index n_out) {
  return SincResampler(fs_in, fs_out).apply(x, n_out);
}

}  // namespace mgdm
