#pragma once

#include "compham/dynamics.hpp"
#include "compham/families.hpp"
#include "compham/trajectory.hpp"

namespace compham {

/// (1 - P)(q - alpha): zero exactly when q carries no more information than qbardot.
Vec primary_residual(const CompositionRule& rule, const Vec& qbar, const Vec& q);

/// (1 - P)(qdot - alpha' qbardot - beta':(qbardot x qbardot)) with qdot = (p - u)/m
/// and qbardot recovered from q.
Vec secondary_residual(const WorkhorseModel& model, const CompositionRule& rule, const PhaseState& s);

double pbar_residual(const PhaseState& s);

ConstraintReport constraint_report(const WorkhorseModel& model, const CompositionRule& rule,
                                   const PhaseState& s);

struct ProjectOptions {
  bool zero_pbar = false;
};

/// Closest q (Euclidean) satisfying the primary constraints at fixed qbar:
/// q <- alpha + P (q_raw - alpha). Momentum p is never touched.
PhaseState project_initial(const CompositionRule& rule, const PhaseState& raw,
                           const ProjectOptions& opts = {});

struct DriftReport {
  std::vector<ConstraintReport> series;
  ConstraintReport max;
};

DriftReport drift_report(const WorkhorseModel& model, const CompositionRule& rule,
                         const Trajectory& traj);

/// Fills hamiltonian and constraints on every sample.
void attach_diagnostics(const WorkhorseModel& model, const CompositionRule& rule, Trajectory& traj);

/// Stacked residuals of the analytic constraint chain of the example families.
///   two oscillators:   [q1 - qbar1, p1 - m/l (q2 - q1), p2 - p1 + l h1 q1, pbar1 - l (h1 - h2) q2]
///   three oscillators: [q2 - qbar2, p2 - m/l (q1 - qbar1), p1 - m/l q3 + l h qbar2,
///                       p3 + l h qbar1, pbar1, pbar2]
/// Throws DimensionMismatch when the state does not have the family's shape.
Vec example_chain_residual(const TwoOscParams& params, const PhaseState& s);
Vec example_chain_residual(const ThreeOscParams& params, const PhaseState& s);
Vec example_chain_residual(const FamilyParams& params, const PhaseState& s);

struct ConstraintClosure {
  int phase_dim = 0;       // 2(I + K)
  int constraint_rank = 0; // rank of all constraints generated by preservation
  int free_dim = 0;        // phase_dim - constraint_rank
  int iterations = 0;      // time-derivative generations until the rank stalled
};

/// Brute-force closure of the primary constraints under an affine canonical
/// flow: repeatedly appends the time derivatives C A of the current
/// constraint rows until the rank stops growing. The flow is linearised by
/// evaluating canonical_field on unit vectors; throws std::domain_error when
/// the field is detectably non-affine.
ConstraintClosure constraint_closure(const WorkhorseModel& model, const CompositionRule& rule);

}  // namespace compham
