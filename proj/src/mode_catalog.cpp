#include "mgdm/mode_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mgdm {

namespace {

constexpr double kPi = std::numbers::pi;

void check_mode_indices(int nu, int mu) {
  if (nu < 0 || mu < 1)
    throw std::invalid_argument("invalid mode indices: require nu >= 0, mu >= 1");
}

// Generalized Laguerre polynomial L_k^a(x) by the three-term recurrence.
double laguerre(int k, int a, double x) {
  if (k == 0) return 1.0;
  double lm1 = 1.0;
  double l = 1.0 + a - x;
  for (int i = 2; i <= k; ++i) {
    const double next = ((2.0 * i - 1.0 + a - x) * l - (i - 1.0 + a) * lm1) / i;
    lm1 = l;
    l = next;
  }
  return l;
}

// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on P_n.
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  nodes.resize(n);
  weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

std::string to_string(const LpMode& mode) {
  std::string s = "LP" + std::to_string(mode.nu) + std::to_string(mode.mu);
  if (mode.nu > 0) s += (mode.orientation == Orientation::A) ? 'a' : 'b';
  return s;
}

LpMode parse_mode(const std::string& name) {
  if (name.size() < 4 || name.substr(0, 2) != "LP")
    throw std::invalid_argument("cannot parse mode name '" + name + "'");
  const char c_nu = name[2], c_mu = name[3];
  if (!std::isdigit(static_cast<unsigned char>(c_nu)) ||
      !std::isdigit(static_cast<unsigned char>(c_mu)))
    throw std::invalid_argument("cannot parse mode name '" + name + "'");
  LpMode m;
  m.nu = c_nu - '0';
  m.mu = c_mu - '0';
  if (name.size() == 5) {
    if (name[4] == 'a') m.orientation = Orientation::A;
    else if (name[4] == 'b') m.orientation = Orientation::B;
    else throw std::invalid_argument("cannot parse mode name '" + name + "'");
  } else if (name.size() != 4) {
    throw std::invalid_argument("cannot parse mode name '" + name + "'");
  }
  if (m.nu == 0 && m.orientation == Orientation::B)
    throw std::invalid_argument("no b-orientation exists for nu = 0");
  check_mode_indices(m.nu, m.mu);
  return m;
}

int group_order(int nu, int mu) {
  check_mode_indices(nu, mu);
  return nu + 2 * mu + 1;
}

ModeGroup enumerate_group(int m) {
  if (m < 3) throw std::invalid_argument("invalid group order: require m >= 3");
  ModeGroup group;
  group.order = m;
  for (int mu = 1; 2 * mu + 1 <= m; ++mu) {
    const int nu = m - 1 - 2 * mu;
    group.members.push_back({nu, mu, Orientation::A});
    if (nu > 0) group.members.push_back({nu, mu, Orientation::B});
  }
  std::sort(group.members.begin(), group.members.end());
  return group;
}

void FiberSpec::validate() const {
  if (!(a > 0)) throw std::invalid_argument("fiber.a must be positive");
  if (!(delta > 0 && delta < 0.05))
    throw std::invalid_argument("fiber.delta must lie in (0, 0.05)");
  if (!(alpha > 0)) throw std::invalid_argument("fiber.alpha must be positive");
  if (!(L >= 0)) throw std::invalid_argument("fiber.L must be nonnegative");
  if (!(lambda > 0)) throw std::invalid_argument("fiber.lambda must be positive");
}

double propagation_constant(int m, const FiberSpec& fiber) {
  fiber.validate();
  if (fiber.alpha != 2.0)
    throw std::invalid_argument("analytic branch supports alpha = 2 only");
  if (m < 3) throw std::invalid_argument("invalid group order: require m >= 3");
  const double k = 2.0 * kPi / fiber.lambda;
  const double n1k = fiber.n1 * k;
  const double radicand =
      n1k * n1k - 2.0 * n1k * std::sqrt(2.0 * fiber.delta) * (m - 2) / fiber.a;
  if (radicand <= 0.0)
    throw std::domain_error("mode group " + std::to_string(m) + " is not guided");
  return std::sqrt(radicand);
}

double group_delay(int m, const FiberSpec& fiber) {
  const double beta = propagation_constant(m, fiber);
  const double omega = 2.0 * kPi * kSpeedOfLight / fiber.lambda;
  const double c = kSpeedOfLight;
  // beta(w) = sqrt(n1^2 w^2 / c^2 - 2 n1 (w/c) sqrt(2 delta) (m-2) / a)
  const double dnum = fiber.n1 * fiber.n1 * omega / (c * c) -
                      fiber.n1 * std::sqrt(2.0 * fiber.delta) * (m - 2) / (fiber.a * c);
  return dnum / beta;
}

double mode_spot_size(const FiberSpec& fiber) {
  const double k = 2.0 * kPi / fiber.lambda;
  return std::sqrt(2.0 * fiber.a / (fiber.n1 * k * std::sqrt(2.0 * fiber.delta)));
}

double mode_field(const LpMode& mode, const FiberSpec& fiber, double r, double phi) {
  check_mode_indices(mode.nu, mode.mu);
  if (fiber.alpha != 2.0)
    throw std::invalid_argument("analytic branch supports alpha = 2 only");
  const double w = mode_spot_size(fiber);
  const double u = r / w;
  const int nu = mode.nu, mu = mode.mu;
  // norm: integral of psi^2 over the plane = 1
  const double angular_int = (nu == 0) ? 2.0 * kPi : kPi;
  const double radial_int = 0.25 * w * w * factorial(mu + nu - 1) / factorial(mu - 1);
  const double norm = 1.0 / std::sqrt(angular_int * radial_int);
  const double radial = std::pow(std::numbers::sqrt2 * u, nu) *
                        laguerre(mu - 1, nu, 2.0 * u * u) * std::exp(-u * u);
  const double angular =
      (mode.orientation == Orientation::A) ? std::cos(nu * phi) : std::sin(nu * phi);
  return norm * radial * angular;
}

PolarGrid PolarGrid::make(const FiberSpec& fiber, int n_radial, int n_azimuthal) {
  PolarGrid grid;
  Eigen::VectorXd x, wgt;
  gauss_legendre(n_radial, x, wgt);
  const double rmax = 3.0 * fiber.a;
  grid.r.resize(n_radial);
  grid.r_weight.resize(n_radial);
  for (int i = 0; i < n_radial; ++i) {
    const double r = 0.5 * rmax * (x[i] + 1.0);
    grid.r[i] = r;
    grid.r_weight[i] = 0.5 * rmax * wgt[i] * r;  // includes r dr
  }
  grid.phi.resize(n_azimuthal);
  for (int j = 0; j < n_azimuthal; ++j) grid.phi[j] = 2.0 * kPi * j / n_azimuthal;
  grid.phi_weight = 2.0 * kPi / n_azimuthal;
  return grid;
}

Eigen::MatrixXd sample_mode(const LpMode& mode, const FiberSpec& fiber, const PolarGrid& grid) {
  Eigen::MatrixXd f(grid.r.size(), grid.phi.size());
  for (Eigen::Index i = 0; i < grid.r.size(); ++i)
    for (Eigen::Index j = 0; j < grid.phi.size(); ++j)
      f(i, j) = mode_field(mode, fiber, grid.r[i], grid.phi[j]);
  return f;
}

std::complex<double> overlap(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& g,
                             const PolarGrid& grid) {
  if (f.rows() != g.rows() || f.cols() != g.cols() || f.rows() != grid.r.size() ||
      f.cols() != grid.phi.size())
    throw std::invalid_argument("overlap: sampling grids differ");
  std::complex<double> acc = 0.0;
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    std::complex<double> row = 0.0;
    for (Eigen::Index j = 0; j < f.cols(); ++j) row += f(i, j) * std::conj(g(i, j));
    acc += grid.r_weight[i] * row;
  }
  return acc * grid.phi_weight;
}

ModeBasis ModeBasis::make(const FiberSpec& fiber, const std::vector<int>& orders) {
  fiber.validate();
  ModeBasis basis;
  basis.fiber = fiber;
  for (int m : orders) {
    ModeGroup g = enumerate_group(m);
    for (const LpMode& mode : g.members) {
      if (basis.index_of(mode) >= 0)
        throw std::invalid_argument("duplicate mode in basis: " + to_string(mode));
      basis.modes.push_back(mode);
      basis.mode_group.push_back(m);
    }
    basis.groups.push_back(std::move(g));
  }
  return basis;
}

int ModeBasis::index_of(const LpMode& mode) const {
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i] == mode) return static_cast<int>(i);
  return -1;
}

}  // namespace mgdm
