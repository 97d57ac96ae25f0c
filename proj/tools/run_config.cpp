#include "run_config.hpp"

#include "compham/oracles.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <set>

namespace compham::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<std::string> get(const pt::ptree& sec, const std::string& key) {
  auto v = sec.get_optional<std::string>(key);
  if (!v) return std::nullopt;
  return trim(v->substr(0, v->find('#')));
}

double number(const pt::ptree& sec, const std::string& where, const std::string& key, double fallback) {
  auto v = get(sec, key);
  if (!v) return fallback;
  auto list = parse_number_list(*v);
  if (list.size() != 1) throw SpecError(where + " " + key + ": expected a single number");
  return list.front();
}

bool flag(const pt::ptree& sec, const std::string& where, const std::string& key, bool fallback) {
  auto v = get(sec, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw SpecError(where + " " + key + ": expected true or false, got '" + *v + "'");
}

std::vector<double> list(const pt::ptree& sec, const std::string& key) {
  auto v = get(sec, key);
  if (!v || v->empty()) return {};
  return parse_number_list(*v);
}

void reject_unknown(const pt::ptree& sec, const std::string& where, const std::set<std::string>& known) {
  for (const auto& [key, value] : sec) {
    if (!known.count(key)) throw SpecError("unknown key '" + key + "' in " + where);
  }
}

bool matches(const Mat& a, const Mat& b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; }

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig cfg;
  cfg.path = path;
  cfg.model = load_model_spec(path);

  pt::ptree root;
  try {
    pt::read_ini(path.string(), root);
  } catch (const pt::ini_parser_error& e) {
    throw SpecError(path.string() + ": line " + std::to_string(e.line()) + ": " + e.message());
  }

  auto wrap = [&path](auto&& f) {
    try {
      f();
    } catch (const SpecError& e) {
      throw SpecError(path.string() + ": " + e.what());
    }
  };

  wrap([&] {
    for (const auto& [name, sec] : root) {
      static const std::set<std::string> known{"workhorse", "composition", "run", "initial", "sweep"};
      if (!known.count(name)) throw SpecError("unknown section [" + name + "]");
    }

    if (auto it = root.find("run"); it != root.not_found()) {
      const auto& run = it->second;
      reject_unknown(run, "[run]", {"method", "step", "rtol", "atol", "t_end", "pbar_zero", "project_primary", "tol"});
      if (auto m = get(run, "method")) {
        try {
          cfg.integrator.method = parse_method(*m);
        } catch (const std::invalid_argument& e) {
          throw SpecError(std::string("[run] method: ") + e.what());
        }
      }
      cfg.integrator.step = number(run, "[run]", "step", cfg.integrator.step);
      cfg.integrator.rtol = number(run, "[run]", "rtol", cfg.integrator.rtol);
      cfg.integrator.atol = number(run, "[run]", "atol", cfg.integrator.atol);
      cfg.integrator.t_end = number(run, "[run]", "t_end", cfg.integrator.t_end);
      cfg.pbar_zero = flag(run, "[run]", "pbar_zero", false);
      cfg.project_primary = flag(run, "[run]", "project_primary", false);
      cfg.tol = number(run, "[run]", "tol", cfg.tol);
    }

    if (auto it = root.find("initial"); it != root.not_found()) {
      const auto& ini = it->second;
      reject_unknown(ini, "[initial]", {"source", "family", "constants", "match", "t0", "qbar", "q", "pbar", "p"});
      InitialSpec init;
      const std::string source = get(ini, "source").value_or("oracle");
      if (source == "oracle") {
        init.source = InitialSpec::Source::oracle;
        init.family = get(ini, "family").value_or("");
        if (init.family != "two_osc" && init.family != "three_osc") {
          throw SpecError("[initial] family must be two_osc or three_osc");
        }
        init.constants = list(ini, "constants");
        const std::size_t want = init.family == "two_osc" ? 6 : 4;
        if (init.constants.size() != want) {
          throw SpecError("[initial] " + init.family + " needs " + std::to_string(want) + " constants");
        }
        init.match = flag(ini, "[initial]", "match", false);
        if (init.match && init.family != "two_osc") throw SpecError("[initial] match applies to two_osc only");
      } else if (source == "explicit") {
        init.source = InitialSpec::Source::explicit_state;
        init.qbar = list(ini, "qbar");
        init.q = list(ini, "q");
        init.pbar = list(ini, "pbar");
        init.p = list(ini, "p");
      } else {
        throw SpecError("[initial] source must be oracle or explicit, got '" + source + "'");
      }
      init.t0 = number(ini, "[initial]", "t0", 0.0);
      cfg.initial = init;
    }

    if (auto it = root.find("sweep"); it != root.not_found()) {
      const auto& sw = it->second;
      reject_unknown(sw, "[sweep]", {"lambdas", "epsilons"});
      SweepSpec s;
      s.lambdas = list(sw, "lambdas");
      s.epsilons = list(sw, "epsilons");
      if (s.lambdas.empty() || s.epsilons.empty()) throw SpecError("[sweep] needs lambdas and epsilons");
      for (double l : s.lambdas)
        if (l == 0.0) throw SpecError("[sweep] lambdas must be nonzero");
      cfg.sweep = s;
    }
  });
  return cfg;
}

std::optional<FamilyParams> detect_family(const ModelSpec& spec) {
  const Mat* beta = std::get_if<Mat>(&spec.beta);
  if (!beta || !spec.alpha_offset.isZero(0.0)) return std::nullopt;
  if (spec.alpha_jacobian && !matches(*spec.alpha_jacobian, spec.alpha_matrix)) return std::nullopt;

  if (spec.dim_q() == 2 && spec.dim_qbar() == 1) {
    if (!matches(spec.alpha_matrix, (Mat(2, 1) << 1, 1).finished())) return std::nullopt;
    if ((*beta)(0, 0) != 0.0 || (*beta)(1, 0) == 0.0) return std::nullopt;
    return TwoOscParams{spec.mass, spec.spring_constants[0], spec.spring_constants[1], spec.lambda * (*beta)(1, 0)};
  }
  if (spec.dim_q() == 3 && spec.dim_qbar() == 2) {
    if (!matches(spec.alpha_matrix, (Mat(3, 2) << 1, 0, 0, 1, 0, 0).finished())) return std::nullopt;
    const double c = (*beta)(2, 0);
    if (c == 0.0 || !matches(*beta, (Mat(3, 2) << 0, c, 0, 0, c, 0).finished())) return std::nullopt;
    const auto& h = spec.spring_constants;
    if (h[0] != h[1] || h[1] != h[2]) return std::nullopt;
    return ThreeOscParams{spec.mass, h[0], spec.lambda * c};
  }
  return std::nullopt;
}

PhaseState initial_state(const RunConfig& cfg, const ModelSpec& spec) {
  if (!cfg.initial) throw SpecError(cfg.path.string() + ": missing [initial] section");
  const InitialSpec& init = *cfg.initial;
  const int dim_q = spec.dim_q(), dim_qbar = spec.dim_qbar();

  PhaseState s;
  if (init.source == InitialSpec::Source::explicit_state) {
    auto take = [&](const std::vector<double>& v, int n, const char* name, bool optional) {
      if (v.empty() && optional) return Vec(Vec::Zero(n));
      if (static_cast<int>(v.size()) != n) {
        throw SpecError(cfg.path.string() + ": [initial] " + name + " needs " + std::to_string(n) + " values");
      }
      return to_vec(v);
    };
    s.t = init.t0;
    s.qbar = take(init.qbar, dim_qbar, "qbar", false);
    s.q = take(init.q, dim_q, "q", false);
    s.pbar = take(init.pbar, dim_qbar, "pbar", true);
    s.p = take(init.p, dim_q, "p", false);
    return s;
  }

  const auto family = detect_family(spec);
  if (!family) throw SpecError(cfg.path.string() + ": oracle initial state needs a model matching a built-in family");
  const auto& c = init.constants;
  if (init.family == "two_osc") {
    const auto* params = std::get_if<TwoOscParams>(&*family);
    if (!params) throw SpecError(cfg.path.string() + ": [initial] family two_osc does not match the model");
    TwoOscConstants k{c[0], c[1], c[2], c[3], c[4], c[5]};
    if (init.match) std::tie(k.c1, k.c1p) = two_osc_match(*params, k.c2, k.c2p);
    return two_osc_state(*params, k, init.t0);
  }
  const auto* params = std::get_if<ThreeOscParams>(&*family);
  if (!params) throw SpecError(cfg.path.string() + ": [initial] family three_osc does not match the model");
  return three_osc_constrained_state(*params, c[0], c[1], c[2], c[3], init.t0);
}

}  // namespace compham::cli
