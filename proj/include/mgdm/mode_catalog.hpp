#pragma once

#include <Eigen/Dense>
#include <compare>
#include <complex>
#include <string>
#include <vector>

namespace mgdm {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

enum class Orientation { A, B };

// Linearly polarized fiber mode LP_{nu,mu}. nu = azimuthal order, mu = radial
// order; nu > 0 modes come in two spatial orientations (cos / sin).
struct LpMode {
  int nu = 0;
  int mu = 1;
  Orientation orientation = Orientation::A;

  auto operator<=>(const LpMode&) const = default;
};

std::string to_string(const LpMode& mode);        // e.g. "LP21a"; "LP02" for nu = 0
LpMode parse_mode(const std::string& name);        // inverse of to_string

// Mode-group order m = nu + 2*mu + 1. The fundamental LP01 sits in group 3
// under this convention (offset +2 from the principal-mode-number count).
int group_order(int nu, int mu);
inline int group_order(const LpMode& m) { return group_order(m.nu, m.mu); }

struct ModeGroup {
  int order = 0;
  std::vector<LpMode> members;  // sorted by (nu, mu, orientation)
};

// All LP modes with nu + 2*mu + 1 = m. Throws std::invalid_argument for m < 3.
ModeGroup enumerate_group(int m);

// Power-law graded-index fiber parameters. Defaults model a standard
// 50-um-core GI-MMF at 1550 nm.
struct FiberSpec {
  double a = 25e-6;        // core radius [m]
  double n1 = 1.47;        // on-axis index
  double delta = 0.01;     // relative index difference
  double alpha = 2.0;      // profile exponent (analytic branch needs 2)
  double L = 5000.0;       // length [m]
  double lambda = 1550e-9; // vacuum wavelength [m]
  double epsilon = 0.0;    // profile-dispersion parameter

  void validate() const;   // throws std::invalid_argument with the offending field
};

// Phase constant beta(m) of the ideal infinite parabolic profile; identical
// for every mode of one group. Throws for alpha != 2 or non-guided m.
double propagation_constant(int m, const FiberSpec& fiber);
inline double propagation_constant(const LpMode& mode, const FiberSpec& fiber) {
  return propagation_constant(group_order(mode), fiber);
}

// Group delay per unit length, d(beta)/d(omega) [s/m], analytic for alpha = 2
// with n1 and delta treated as frequency-independent (epsilon = 0 lineage).
double group_delay(int m, const FiberSpec& fiber);

// Laguerre-Gauss mode field of the infinite parabolic profile, unit-norm
// under the overlap integral. Real-valued (constant optical phase).
double mode_field(const LpMode& mode, const FiberSpec& fiber, double r, double phi);

// Mode-field spot size w with w^2 = 2a / (n1 k sqrt(2 delta)).
double mode_spot_size(const FiberSpec& fiber);

// Deterministic tensor quadrature grid in (r, phi): Gauss-Legendre radial
// nodes on [0, 3a], uniform periodic nodes in phi.
struct PolarGrid {
  Eigen::VectorXd r;         // radial nodes [m]
  Eigen::VectorXd r_weight;  // Gauss-Legendre weights, includes the r dr factor
  Eigen::VectorXd phi;       // azimuthal nodes [rad]
  double phi_weight = 0.0;   // uniform (trapezoid) weight

  static PolarGrid make(const FiberSpec& fiber, int n_radial = 128, int n_azimuthal = 256);
};

// Field sampled on a grid, nodes as (radial x azimuthal) matrix.
Eigen::MatrixXd sample_mode(const LpMode& mode, const FiberSpec& fiber, const PolarGrid& grid);

// Quadrature inner product  integral f conj(g) dA.  Throws on grid mismatch.
std::complex<double> overlap(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& g,
                             const PolarGrid& grid);

// Flattened catalog over a set of group orders with a stable mode indexing.
struct ModeBasis {
  FiberSpec fiber;
  std::vector<ModeGroup> groups;
  std::vector<LpMode> modes;        // concatenated group members, flattened index
  std::vector<int> mode_group;      // group order per flattened index

  static ModeBasis make(const FiberSpec& fiber, const std::vector<int>& orders);

  int size() const { return static_cast<int>(modes.size()); }
  int index_of(const LpMode& mode) const;  // -1 when absent
};

}  // namespace mgdm
