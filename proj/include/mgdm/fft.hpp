#pragma once

#define EIGEN_FFTW_DEFAULT
#include <unsupported/Eigen/FFT>

#include <Eigen/Dense>
#include <complex>
#include <mutex>
#include <set>

namespace mgdm {

// Thin wrapper over Eigen::FFT (FFTW backend). FFTW plan creation is not
// thread-safe, so the first transform of a given size per thread is
// serialized; execution itself runs lock-free.
class Fft {
 public:
  static Eigen::VectorXcd forward(const Eigen::VectorXcd& x) {
    return run(x, /*inverse=*/false);
  }
  static Eigen::VectorXcd inverse(const Eigen::VectorXcd& X) {
    return run(X, /*inverse=*/true);
  }

 private:
  static Eigen::VectorXcd run(const Eigen::VectorXcd& x, bool inverse) {
    thread_local Eigen::FFT<double> fft;
    thread_local std::set<Eigen::Index> planned;
    Eigen::VectorXcd y(x.size());
    if (!planned.count(x.size())) {
      static std::mutex plan_mutex;
      std::lock_guard<std::mutex> lock(plan_mutex);
      if (inverse) fft.inv(y, x); else fft.fwd(y, x);
      // warm both directions while holding the lock
      Eigen::VectorXcd tmp(x.size());
      if (inverse) fft.fwd(tmp, y); else fft.inv(tmp, y);
      planned.insert(x.size());
      return y;
    }
    if (inverse) fft.inv(y, x); else fft.fwd(y, x);
    return y;
  }
};

}  // namespace mgdm
