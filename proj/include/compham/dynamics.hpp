#pragma once

#include "compham/model.hpp"
#include "compham/projection.hpp"
#include "compham/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace compham {

/// Point of the enlarged phase space (qbar, q, pbar, p) at time t.
struct PhaseState {
  double t = 0.0;
  Vec qbar;
  Vec q;
  Vec pbar;
  Vec p;

  static PhaseState zero(int dim_q, int dim_qbar, double t = 0.0);
  bool all_finite() const;
};

/// Time derivatives of the PhaseState components.
struct FieldEval {
  Vec d_qbar;
  Vec d_q;
  Vec d_pbar;
  Vec d_p;
};

using PhaseField = std::function<FieldEval(const PhaseState&)>;

/// Packs (qbar, q, pbar, p) into one flat vector, in that order.
Vec pack(const PhaseState& s);
Vec pack(const FieldEval& f);
PhaseState unpack(const Vec& y, int dim_q, int dim_qbar, double t);

/// (p - u).(p - u) / 2m + V(q) + (q - alpha) . beta_inv . pbar
double hamiltonian(const WorkhorseModel& model, const CompositionRule& rule, const PhaseState& s);

/// Hamiltonian without the pbar coupling term.
double workhorse_energy(const WorkhorseModel& model, const Vec& q, const Vec& p);

/// Canonical evolution on the enlarged space. The state carries plain p, so
/// the evolution of p - u is converted with du/dq . dq/dt.
FieldEval canonical_field(const WorkhorseModel& model, const CompositionRule& rule,
                          const PhaseState& s);

struct WorkhorseRate {
  Vec dq;
  Vec dp;
};

/// First-order form of m qddot + omega qdot + dV/dq = 0 in (q, p).
WorkhorseRate workhorse_field(const WorkhorseModel& model, const Vec& q, const Vec& p);

struct PbarIdentification {
  Vec pbar;
  /// Norm of the part of -(m qddot + omega qdot + dV/dq) outside range(beta_inv).
  double out_of_range = 0.0;
};

/// Recovers pbar from beta_inv pbar = -(m qddot + omega qdot + dV/dq).
/// beta^T is the left inverse of beta_inv, so the in-range part is exact.
PbarIdentification pbar_identify(const WorkhorseModel& model, const CompositionRule& rule,
                                 const Vec& qbar, const Vec& q, const Vec& qdot, const Vec& qddot);

PhaseField canonical_system(const WorkhorseModel& model, const CompositionRule& rule);

}  // namespace compham
