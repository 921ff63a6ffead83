#include "mgdm/mux_demux.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <stdexcept>

#include "mgdm/rng.hpp"

namespace mgdm {

void MuxSpec::validate() const {
  if (ports.empty()) throw std::invalid_argument("mux.ports must be nonempty");
  std::set<int> groups;
  for (const LpMode& p : ports) {
    if (!groups.insert(group_order(p)).second)
      throw std::invalid_argument("mux.ports targets must lie in pairwise distinct mode groups");
  }
  if (!(selectivity_db >= 0)) throw std::invalid_argument("mux.selectivity_db must be >= 0");
  if (!(insertion_loss_db >= 0)) throw std::invalid_argument("mux.insertion_loss_db must be >= 0");
}

TransferMatrix build_mux(const MuxSpec& spec, const ModeBasis& basis) {
  spec.validate();
  const int n_modes = basis.size();
  const int n_ports = static_cast<int>(spec.ports.size());

  TransferMatrix t;
  t.m = Eigen::MatrixXcd::Zero(n_modes, n_ports);
  for (const LpMode& mode : basis.modes) t.out_labels.push_back(to_string(mode));

  const double gain = std::pow(10.0, -spec.insertion_loss_db / 20.0);
  const double leak = std::isinf(spec.selectivity_db)
                          ? 0.0
                          : std::pow(10.0, -spec.selectivity_db / 20.0);

  for (int p = 0; p < n_ports; ++p) {
    const int target = basis.index_of(spec.ports[p]);
    if (target < 0)
      throw std::invalid_argument("mux target mode " + to_string(spec.ports[p]) +
                                  " is not in the basis");
    t.in_labels.push_back("port" + std::to_string(p) + ":" + to_string(spec.ports[p]));

    auto rng = make_engine(derive_seed(spec.seed, {stream::kMuxLeakage, std::uint64_t(p)}));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (int j = 0; j < n_modes; ++j) {
      if (j == target) {
        t.m(j, p) = gain;
      } else if (leak > 0.0) {
        t.m(j, p) = gain * leak * std::polar(1.0, phase(rng));
      }
    }
    const double col_power = t.m.col(p).squaredNorm();
    if (col_power > 1.0) t.m.col(p) /= std::sqrt(col_power);
  }

  // passivity: no input combination may gain power
  const double smax = t.m.jacobiSvd().singularValues()(0);
  if (smax > 1.0) t.m /= smax;
  return t;
}

TransferMatrix build_demux(const MuxSpec& spec, const ModeBasis& basis) {
  TransferMatrix mux = build_mux(spec, basis);
  TransferMatrix t;
  t.m = mux.m.adjoint();
  t.in_labels = std::move(mux.out_labels);
  t.out_labels = std::move(mux.in_labels);
  return t;
}

Eigen::VectorXcd apply_transfer(const TransferMatrix& t, const Eigen::VectorXcd& v) {
  if (v.size() != t.m.cols())
    throw std::invalid_argument("apply_transfer: dimension mismatch");
  return t.m * v;
}

}  // namespace mgdm
