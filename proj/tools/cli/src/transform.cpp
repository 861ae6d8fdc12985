#include "kovtop_cli/transform.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>

#include "kovtop/abel.hpp"
#include "kovtop/errors.hpp"
#include "kovtop/koetter.hpp"
#include "kovtop/kov_vars.hpp"
#include "kovtop/reference.hpp"

namespace kovtop::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> columns() {
  std::vector<std::string> c{"t", "f1", "f2", "f3", "g1", "g2", "g3"};
  for (const char* name : {"s1", "s2", "x1", "x2", "x3", "y1", "y2", "y3",
                           "u1", "u2"}) {
    c.push_back(std::string("Re_") + name);
    c.push_back(std::string("Im_") + name);
  }
  c.push_back("flag");
  return c;
}

void push(std::vector<double>& row, Complex z) {
  row.push_back(z.real());
  row.push_back(z.imag());
}

}  // namespace

TransformTable transform(const Trajectory& traj) {
  TransformTable table;
  table.columns = columns();

  std::optional<RootBranches> branches;
  try {
    branches = root_branches(traj.reference_integrals());
  } catch (const Error&) {
    branches.reset();
  }

  // u per sample index from the segmented quadrature.
  std::map<std::size_t, std::array<Complex, 2>> u_at;
  std::map<std::size_t, bool> bridged_at;
  if (branches) {
    try {
      AbelOptions opt;
      opt.min_window_abs_m2 = reference::kChartWindowMinAbsM2;
      const AbelJacobiStream stream = abel_jacobi_stream(traj, opt);
      for (const auto& s : stream.samples) bridged_at[s.index] = s.near_branch;
      const AbelIncrements inc = abel_increments(stream);
      for (const auto& seg : inc.segments)
        for (std::size_t k = 0; k < seg.index.size(); ++k)
          u_at[seg.index[k]] = seg.u[k];
    } catch (const Error&) {
      u_at.clear();
    }
  }

  const IntegralSet& integ = traj.reference_integrals();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::vector<double> row{traj.time(i)};
    std::uint32_t flag = 0;
    FgCoords fg;
    bool chart_ok = true;
    try {
      fg = to_fg(traj.state(i));
    } catch (const ChartSingularity&) {
      chart_ok = false;
      flag |= kFlagChart;
      ++table.chart_failures;
    }
    if (chart_ok) {
      for (int k = 0; k < 3; ++k) row.push_back(fg.f(k));
      for (int k = 0; k < 3; ++k) row.push_back(fg.g(k));
      const SpectralVars sv = s_forms(fg, integ);
      if (sv.double_root) flag |= kFlagCollision;
      push(row, sv.s1);
      push(row, sv.s2);
      if (branches) {
        const CVec3 x = x_from_fg(fg, *branches);
        const CVec3 y = y_from_fg(fg, *branches);
        for (int k = 0; k < 3; ++k) push(row, x(k));
        for (int k = 0; k < 3; ++k) push(row, y(k));
      } else {
        flag |= kFlagNoRoots;
        row.insert(row.end(), 12, kNaN);
      }
    } else {
      row.insert(row.end(), 6 + 4 + 12, kNaN);
    }
    const auto it = u_at.find(i);
    if (it != u_at.end()) {
      push(row, it->second[0]);
      push(row, it->second[1]);
      const auto b = bridged_at.find(i);
      if (b != bridged_at.end() && b->second) flag |= kFlagBridged;
    } else {
      flag |= kFlagNoAbel;
      row.insert(row.end(), 4, kNaN);
    }
    table.rows.push_back(std::move(row));
    table.flags.push_back(flag);
  }
  if (2 * table.chart_failures > traj.size())
    throw NumericalFailure("chart unusable on " +
                           std::to_string(table.chart_failures) + " of " +
                           std::to_string(traj.size()) + " samples");
  return table;
}

void write_transform_csv(std::ostream& os, const TransformTable& table) {
  for (std::size_t k = 0; k < table.columns.size(); ++k)
    os << (k ? "," : "") << table.columns[k];
  os << '\n';
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t k = 0; k < table.rows[i].size(); ++k)
      os << (k ? "," : "") << format_double(table.rows[i][k]);
    os << ',' << table.flags[i] << '\n';
  }
}

Json transform_json(const TransformTable& table) {
  Json j;
  j["columns"] = table.columns;
  j["chart_failures"] = table.chart_failures;
  Json rows = Json::array();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    Json r = Json::array();
    for (double v : table.rows[i]) {
      if (std::isfinite(v))
        r.push_back(v);
      else
        r.push_back(nullptr);
    }
    r.push_back(table.flags[i]);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace kovtop::cli
