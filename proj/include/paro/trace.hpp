#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "paro/errors.hpp"
#include "paro/sym_matrix.hpp"

namespace paro {

// One orbital at one iteration; iteration 0 is the initial state.
struct TraceRow {
  int iter = 0;
  int cluster = 0;
  int j = 0;
  double ritz_value = 0.0;
  double shift = 0.0;
  double dist_to_oracle = std::numeric_limits<double>::quiet_NaN();  // per cluster
  bool locked = false;
};

struct IterationTrace {
  std::vector<TraceRow> rows;

  int iterations() const {
    int m = -1;
    for (const TraceRow& r : rows) m = std::max(m, r.iter);
    return m;
  }
};

inline constexpr const char* kTraceHeader =
    "iter,cluster,j,ritz_value,shift,dist_to_oracle,locked";

inline void write_trace_csv(const std::string& path, const IterationTrace& trace) {
  std::ofstream out(path);
  if (!out) throw BadInput("trace: cannot open " + path + " for writing");
  out << kTraceHeader << "\n";
  for (const TraceRow& r : trace.rows) {
    out << r.iter << "," << r.cluster << "," << r.j << ","
        << format_double(r.ritz_value) << "," << format_double(r.shift) << ","
        << format_double(r.dist_to_oracle) << "," << (r.locked ? 1 : 0) << "\n";
  }
  if (!out) throw BadInput("trace: write failed for " + path);
}

inline IterationTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput("trace: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw BadInput("trace: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw BadInput("trace: unexpected header in " + path);
  IterationTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    TraceRow r;
    std::string field;
    auto next = [&]() -> std::string {
      if (!std::getline(ls, field, ',')) throw BadInput("trace: short row in " + path);
      return field;
    };
    r.iter = std::stoi(next());
    r.cluster = std::stoi(next());
    r.j = std::stoi(next());
    r.ritz_value = std::stod(next());
    r.shift = std::stod(next());
    r.dist_to_oracle = std::stod(next());
    r.locked = std::stoi(next()) != 0;
    trace.rows.push_back(r);
  }
  return trace;
}

// Observed per-iteration error: max over clusters of the traced distance.
// NaN for iterations without any oracle distance.
inline std::vector<double> eps_hat_series(const IterationTrace& trace) {
  const int last = trace.iterations();
  if (last < 0) return {};
  std::vector<double> eps(static_cast<size_t>(last) + 1,
                          std::numeric_limits<double>::quiet_NaN());
  for (const TraceRow& r : trace.rows) {
    if (std::isnan(r.dist_to_oracle)) continue;
    double& e = eps[static_cast<size_t>(r.iter)];
    if (std::isnan(e) || r.dist_to_oracle > e) e = r.dist_to_oracle;
  }
  return eps;
}

}  // namespace paro
