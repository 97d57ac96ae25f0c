#pragma once

#include "compham/dynamics.hpp"
#include "compham/families.hpp"
#include "compham/integrator.hpp"
#include "compham/model_spec.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace compham::cli {

/// Everything a subcommand needs, read from one INI file. The model lives in
/// [workhorse]/[composition]; the rest is
///
///     [run]                      # all optional; command-line flags win
///     method = rk45              # rk4 | rk45
///     step = 1e-3
///     rtol = 1e-10
///     atol = 1e-12
///     t_end = 10
///     pbar_zero = false
///     project_primary = false
///     tol = 1e-6                 # two-step consistency tolerance
///
///     [initial]
///     source = oracle            # oracle | explicit
///     family = two_osc           # two_osc | three_osc (oracle only)
///     constants = 0, 0, 1, 0, 0, 0
///     match = true               # two_osc: derive c1, c1p from c2, c2p
///     t0 = 0
///     qbar = 0.5                 # explicit only; pbar defaults to zero
///     q = 0.5, 1
///     pbar = 0
///     p = 0.5, -0.5
///
///     [sweep]
///     lambdas = 0.5, 1, 2
///     epsilons = 1e-8, 0
///
/// two_osc constants are c1, c1p, c2, c2p, cbar, cbarp; three_osc constants
/// are c1, c1p, c2, c2p.
struct InitialSpec {
  enum class Source { oracle, explicit_state };
  Source source = Source::oracle;
  std::string family;
  std::vector<double> constants;
  bool match = false;
  double t0 = 0.0;
  std::vector<double> qbar, q, pbar, p;
};

struct SweepSpec {
  std::vector<double> lambdas;
  std::vector<double> epsilons;
};

struct RunConfig {
  std::filesystem::path path;
  ModelSpec model;
  IntegratorOptions integrator;
  bool pbar_zero = false;
  bool project_primary = false;
  double tol = 1e-6;
  std::optional<InitialSpec> initial;
  std::optional<SweepSpec> sweep;
};

/// Throws SpecError on anything malformed.
RunConfig load_run_config(const std::filesystem::path& path);

/// The oracle family described by the model spec, if its shape and rule
/// coincide with one of the built-in families.
std::optional<FamilyParams> detect_family(const ModelSpec& spec);

/// Builds the initial phase state for the given spec (lambda taken from it).
/// Throws SpecError when the state and the model disagree.
PhaseState initial_state(const RunConfig& cfg, const ModelSpec& spec);

}  // namespace compham::cli
