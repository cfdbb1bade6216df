#include "cuntzrec/channels.hpp"

#include "cuntzrec/errors.hpp"
#include "cuntzrec/recovery.hpp"

namespace cuntzrec {

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::error: return "error";
    case ChannelKind::projection: return "projection";
    case ChannelKind::recovery: return "recovery";
    case ChannelKind::isometry: return "isometry";
  }
  return "unknown";
}

DensityMatrix Superoperator::apply(const DensityMatrix& rho) const {
  const auto n = static_cast<Eigen::Index>(rho.basis->dim());
  CMatrix out = CMatrix::Zero(n, n);
  for (const auto& k : kraus_terms) {
    require_same_basis(*k.basis, *rho.basis, "channel application");
    out.noalias() += k.matrix * rho.matrix * k.matrix.adjoint();
  }
  return {rho.basis, std::move(out)};
}

DensityMatrix apply_error_channel(const GaugeMultiplet& m, const DensityMatrix& rho,
                                  bool renormalize) {
  DensityMatrix out = Superoperator{m.generators, ChannelKind::error}.apply(rho);
  if (renormalize) {
    const double tr = out.trace();
    if (tr > 0.0) out.matrix /= tr;
  }
  return out;
}

DensityMatrix apply_projection_channel(const std::vector<FieldOperator>& projectors,
                                       const DensityMatrix& rho) {
  return Superoperator{projectors, ChannelKind::projection}.apply(rho);
}

DensityMatrix apply_recovery_channel(const RecoveryPlan& plan, const DensityMatrix& rho) {
  return Superoperator{plan.operators, ChannelKind::recovery}.apply(rho);
}

DensityMatrix apply_isometry_channel(const FieldOperator& s, const DensityMatrix& rho) {
  return Superoperator{{s}, ChannelKind::isometry}.apply(rho);
}

}  // namespace cuntzrec
