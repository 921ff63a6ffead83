#pragma once

#include <Eigen/Dense>
#include <complex>

namespace mgdm {

// Sampled complex optical field.
struct Waveform {
  Eigen::VectorXcd samples;
  double rate = 0.0;  // samples per second
};

// Sampled real electrical signal.
struct RealWaveform {
  Eigen::VectorXd samples;
  double rate = 0.0;
};

}  // namespace mgdm
