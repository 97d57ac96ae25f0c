#include "compham/trajectory.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace compham {

std::string csv_header(int dim_q, int dim_qbar) {
  std::string h = "t";
  auto block = [&h](const char* name, int n) {
    for (int i = 1; i <= n; ++i) h += "," + std::string(name) + "_" + std::to_string(i);
  };
  block("qbar", dim_qbar);
  block("q", dim_q);
  block("pbar", dim_qbar);
  block("p", dim_q);
  h += ",H,primary_norm,secondary_norm,pbar_norm";
  return h;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.empty()) throw std::invalid_argument("cannot write an empty trajectory");
  const auto dim_q = static_cast<int>(traj.front().q.size());
  const auto dim_qbar = static_cast<int>(traj.front().qbar.size());
  const bool diag = traj.has_diagnostics();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::ostringstream line;
  line.precision(17);
  os << csv_header(dim_q, dim_qbar) << '\n';
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const PhaseState& s = traj.samples[n];
    line.str({});
    line << s.t;
    for (const Vec* v : {&s.qbar, &s.q, &s.pbar, &s.p})
      for (Eigen::Index i = 0; i < v->size(); ++i) line << ',' << (*v)[i];
    if (diag) {
      const auto& c = traj.constraints[n];
      line << ',' << traj.hamiltonian[n] << ',' << c.primary_norm << ',' << c.secondary_norm << ','
           << c.pbar_norm;
    } else {
      line << ',' << nan << ',' << nan << ',' << nan << ',' << nan;
    }
    os << line.str() << '\n';
  }
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

int count_prefix(const std::vector<std::string>& cols, const std::string& prefix) {
  int n = 0;
  for (const auto& c : cols)
    if (c.rfind(prefix, 0) == 0 && c.find_first_not_of("0123456789", prefix.size()) == std::string::npos) ++n;
  return n;
}

}  // namespace

Trajectory read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("trajectory csv: missing header");
  const auto cols = split_commas(line);
  const int dim_qbar = count_prefix(cols, "qbar_");
  const int dim_q = count_prefix(cols, "q_");
  if (line != csv_header(dim_q, dim_qbar)) throw std::runtime_error("trajectory csv: unexpected header");

  Trajectory traj;
  const auto width = cols.size();
  std::size_t row = 1;
  bool diag = true;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    auto cells = split_commas(line);
    if (cells.size() != width) {
      throw std::runtime_error("trajectory csv: row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " cells, expected " + std::to_string(width));
    }
    Vec y(static_cast<Eigen::Index>(width) - 1);
    for (std::size_t c = 1; c < width; ++c) y[static_cast<Eigen::Index>(c - 1)] = std::stod(cells[c]);
    const Eigen::Index n_state = 2 * (dim_q + dim_qbar);
    traj.samples.push_back(unpack(y.head(n_state), dim_q, dim_qbar, std::stod(cells[0])));
    const Vec d = y.tail(4);
    if (d.hasNaN()) diag = false;
    traj.hamiltonian.push_back(d[0]);
    traj.constraints.push_back({d[1], d[2], d[3]});
  }
  if (!diag) {
    traj.hamiltonian.clear();
    traj.constraints.clear();
  }
  return traj;
}

}  // namespace compham
