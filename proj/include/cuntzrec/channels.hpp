#pragma once

// Kraus-sum maps rho -> sum_k K_k rho K_k^dag built from the multiplet.

#include <string_view>
#include <vector>

#include "cuntzrec/cuntz.hpp"
#include "cuntzrec/wordspace.hpp"

namespace cuntzrec {

struct RecoveryPlan;

enum class ChannelKind { error, projection, recovery, isometry };

std::string_view to_string(ChannelKind kind);

struct Superoperator {
  std::vector<FieldOperator> kraus_terms;
  ChannelKind label;

  DensityMatrix apply(const DensityMatrix& rho) const;
};

/// rho_F = sum_i Psi_i rho Psi_i^dag. Scales the trace by d on states
/// supported below the top level; `renormalize` divides by the output trace.
DensityMatrix apply_error_channel(const GaugeMultiplet& m, const DensityMatrix& rho,
                                  bool renormalize = false);

DensityMatrix apply_projection_channel(const std::vector<FieldOperator>& projectors,
                                       const DensityMatrix& rho);

DensityMatrix apply_recovery_channel(const RecoveryPlan& plan, const DensityMatrix& rho);

DensityMatrix apply_isometry_channel(const FieldOperator& s, const DensityMatrix& rho);

}  // namespace cuntzrec
