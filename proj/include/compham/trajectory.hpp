#pragma once

#include "compham/dynamics.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace compham {

/// Per-sample constraint norms.
struct ConstraintReport {
  double primary_norm = 0.0;
  double secondary_norm = 0.0;
  double pbar_norm = 0.0;
};

/// Ordered samples with optional diagnostics. When diagnostics are attached,
/// hamiltonian and constraints have one entry per sample.
struct Trajectory {
  std::vector<PhaseState> samples;
  /// Set for fixed-step runs; adaptive runs keep the accepted step times only.
  std::optional<double> uniform_step;
  std::vector<double> hamiltonian;
  std::vector<ConstraintReport> constraints;

  bool empty() const noexcept { return samples.empty(); }
  std::size_t size() const noexcept { return samples.size(); }
  const PhaseState& front() const { return samples.front(); }
  const PhaseState& back() const { return samples.back(); }
  bool has_diagnostics() const noexcept {
    return !samples.empty() && hamiltonian.size() == samples.size() &&
           constraints.size() == samples.size();
  }
};

/// Header row then one line per sample: t, qbar_1..K, q_1..I, pbar_1..K,
/// p_1..I, H, primary_norm, secondary_norm, pbar_norm; 17 significant digits.
/// Diagnostic columns are written as nan when absent.
void write_csv(std::ostream& os, const Trajectory& traj);
std::string csv_header(int dim_q, int dim_qbar);

/// Parses the format produced by write_csv; dimensions come from the header.
Trajectory read_csv(std::istream& is);

}  // namespace compham
