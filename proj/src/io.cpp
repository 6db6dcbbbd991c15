#include "daeo/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "fmt/format.h"
#include "json.hpp"

#include "daeo/errors.hpp"

namespace daeo {

namespace {

using nlohmann::json;

std::string format_value(double v) { return fmt::format("{:.17g}", v); }

double parse_value(const std::string &cell, std::size_t line) {
  double v = 0.0;
  const char *first = cell.data();
  const char *last = first + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw UsageError(fmt::format("csv line {}: '{}' is not a number", line, cell));
  }
  return v;
}

std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cells.push_back(cell);
  }
  return cells;
}

json vector_json(const Eigen::VectorXd &v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

} // namespace

std::vector<std::string> csv_header(const ProblemSpec &spec) {
  std::vector<std::string> h{"t"};
  for (std::size_t i = 0; i < spec.n_x; ++i) {
    h.push_back(fmt::format("x{}", i));
  }
  for (std::size_t i = 0; i < spec.n_y; ++i) {
    h.push_back(fmt::format("ystar{}", i));
  }
  h.emplace_back("n_optimizers");
  h.emplace_back("is_event");
  return h;
}

CsvTable to_table(const ProblemSpec &spec, const Trajectory &traj) {
  CsvTable table{csv_header(spec), {}};
  for (const auto &p : traj.points) {
    std::vector<double> row{p.state.t};
    row.insert(row.end(), p.state.x.data(), p.state.x.data() + p.state.x.size());
    const Eigen::VectorXd &y = p.state.y_star();
    row.insert(row.end(), y.data(), y.data() + y.size());
    row.push_back(static_cast<double>(p.state.optimizers.size()));
    row.push_back(p.is_event ? 1.0 : 0.0);
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(std::ostream &os, const CsvTable &table) {
  os << fmt::format("{}\n", fmt::join(table.header, ","));
  std::vector<std::string> cells;
  for (const auto &row : table.rows) {
    cells.clear();
    for (double v : row) {
      cells.push_back(format_value(v));
    }
    os << fmt::format("{}\n", fmt::join(cells, ","));
  }
}

CsvTable read_csv(std::istream &is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) {
    throw UsageError("csv: missing header");
  }
  table.header = split(line);
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != table.header.size()) {
      throw UsageError(fmt::format("csv line {}: expected {} columns, got {}", line_no,
                                   table.header.size(), cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto &c : cells) {
      row.push_back(parse_value(c, line_no));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string sidecar_json(const ProblemSpec &spec, const SolverConfig &cfg,
                         const Trajectory &traj, bool include_rows) {
  json doc;
  doc["problem"] = {{"name", spec.name}, {"n_x", spec.n_x}, {"n_y", spec.n_y},
                    {"t0", spec.t0},     {"t_end", spec.t_end}};
  json config = json::object();
  for (const auto &[key, value] : config_entries(cfg)) {
    config[key] = value;
  }
  doc["config"] = config;
  doc["counts"] = {{"steps", traj.stats.steps},
                   {"newton_iterations", traj.stats.newton_iterations},
                   {"global_searches", traj.stats.global_searches},
                   {"forced_searches", traj.stats.forced_searches},
                   {"events", traj.stats.events},
                   {"uncorrectable_switches", traj.stats.uncorrectable_switches},
                   {"vanished_optimizers", traj.stats.vanished}};
  doc["wall_seconds"] = traj.wall_seconds;
  json events = json::array();
  for (const auto &e : traj.events) {
    events.push_back({{"tau", e.tau},
                      {"from_index", e.from_index},
                      {"to_index", e.to_index},
                      {"from_id", e.from_id},
                      {"to_id", e.to_id},
                      {"x_at_tau", vector_json(e.x_at_tau)},
                      {"residual_H", e.residual_H}});
  }
  doc["events"] = events;
  if (include_rows) {
    const CsvTable table = to_table(spec, traj);
    doc["columns"] = table.header;
    doc["rows"] = table.rows;
  }
  return doc.dump(2);
}

} // namespace daeo
