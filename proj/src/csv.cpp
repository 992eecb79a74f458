#include "abmceg/csv.hpp"

#include <sstream>

#include "abmceg/simulate.hpp"

namespace abmceg {

std::string write_trajectory_csv(const AbmSpec& spec,
                                 const TrajectoryDataset& data,
                                 std::optional<std::uint64_t> seed) {
  std::ostringstream out;
  if (seed) {
    out << "# seed=" << *seed << " generator=" << generator_name() << "\n";
  }
  for (std::size_t v = 0; v < spec.variables.size(); ++v) {
    out << (v ? "," : "") << spec.variables[v].name;
  }
  out << "\n";
  for (const Context& row : data.rows) {
    for (std::size_t v = 0; v < spec.variables.size(); ++v) {
      if (v) out << ",";
      if (row[v] != kUnset) out << spec.variables[v].outcomes[row[v]];
    }
    out << "\n";
  }
  return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

}  // namespace

TrajectoryDataset read_trajectory_csv(const AbmSpec& spec,
                                      const std::string& text,
                                      std::string provenance) {
  TrajectoryDataset data;
  data.provenance = std::move(provenance);

  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  long long row_number = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen && (line.empty() || line[0] == '#')) continue;
    const auto cells = split_csv_line(line);
    if (!header_seen) {
      if (cells.size() != spec.variables.size()) {
        throw SpecError("header has " + std::to_string(cells.size()) +
                        " columns, expected " +
                        std::to_string(spec.variables.size()));
      }
      for (std::size_t v = 0; v < cells.size(); ++v) {
        if (cells[v] != spec.variables[v].name) {
          throw SpecError("header column " + std::to_string(v + 1) + " is '" +
                          cells[v] + "', expected '" + spec.variables[v].name +
                          "' (declared order)");
        }
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;  // trailing blank lines
    ++row_number;
    if (cells.size() != spec.variables.size()) {
      throw DataError(row_number, "has " + std::to_string(cells.size()) +
                                      " columns, expected " +
                                      std::to_string(spec.variables.size()));
    }
    Context row(spec.variables.size(), kUnset);
    for (std::size_t v = 0; v < cells.size(); ++v) {
      if (cells[v].empty()) continue;
      const int k = spec.variables[v].outcome_index(cells[v]);
      if (k == kUnset) {
        throw DataError(row_number, "unknown outcome '" + cells[v] +
                                        "' of variable '" +
                                        spec.variables[v].name + "'");
      }
      row[v] = k;
    }
    data.rows.push_back(std::move(row));
  }
  if (!header_seen) throw SpecError("trajectory CSV has no header row");
  return data;
}

}  // namespace abmceg
