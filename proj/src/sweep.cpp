#include "healthgame/sweep.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "healthgame/parallel.hpp"
#include "healthgame/table_io.hpp"

namespace healthgame {

void Axis::validate(const char* name) const {
  if (!std::isfinite(min) || !std::isfinite(max)) throw InvalidArgument(std::string(name) + " axis bounds must be finite");
  if (points < 1) throw InvalidArgument(std::string(name) + " axis needs at least one point");
  if (points == 1 && min != max) throw InvalidArgument(std::string(name) + " axis with one point needs min == max");
  if (points >= 2 && !(min < max)) throw InvalidArgument(std::string(name) + " axis needs min < max");
}

double Axis::at(int i) const {
  if (points == 1) return min;
  if (i == points - 1) return max;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
}

std::string_view to_string(ModelVariant v) { return v == ModelVariant::Punishment ? "punishment" : "baseline"; }

std::optional<ModelVariant> parse_variant(std::string_view s) {
  if (s == "baseline") return ModelVariant::Baseline;
  if (s == "punishment") return ModelVariant::Punishment;
  return std::nullopt;
}

void SweepSpec::validate() const {
  reputation_benefit.validate("b_R");
  patient_benefit.validate("b_P");
  params.validate();
  if (loaded && !loaded->rule)
    throw InvalidArgument("sweeping a loaded table needs a substitution rule for b_R and b_P");
}

PayoffTable SweepSpec::table_at(double b_r, double b_p) const {
  PayoffTable table;
  if (loaded) {
    if (!loaded->rule) throw InvalidArgument("sweeping a loaded table needs a substitution rule for b_R and b_P");
    table = PayoffTable(loaded->base.entries() + b_r * loaded->rule->per_reputation_benefit.entries() +
                        b_p * loaded->rule->per_patient_benefit.entries());
  } else {
    GameParams p = params;
    p.reputation_benefit = b_r;
    p.patient_benefit = b_p;
    table = build_reference_table(p);
  }
  if (variant == ModelVariant::Punishment) table = apply_punishment(table, params.punish_cost, params.fine);
  return table;
}

SweepGrid run_sweep(const SweepSpec& spec, int jobs) {
  spec.validate();
  SweepGrid grid;
  grid.rows = spec.reputation_benefit.points;
  grid.cols = spec.patient_benefit.points;
  grid.cells.resize(static_cast<std::size_t>(grid.rows * grid.cols));
  parallel_for(grid.cells.size(), jobs, [&](std::size_t idx) {
    const int r = static_cast<int>(idx) / grid.cols;
    const int c = static_cast<int>(idx) % grid.cols;
    SweepCell& cell = grid.cells[idx];
    cell.reputation_benefit = spec.reputation_benefit.at(r);
    cell.patient_benefit = spec.patient_benefit.at(c);
    try {
      const auto chain = build_transition_matrix(spec.table_at(cell.reputation_benefit, cell.patient_benefit),
                                                 spec.params.population_size, spec.params.selection);
      const auto metrics = cooperation_metrics(stationary_distribution(chain));
      cell.frequencies = metrics.frequencies;
      cell.cooperation = metrics.marginal;
    } catch (const std::exception& e) {
      throw InvalidArgument("sweep cell (b_R=" + format_double(cell.reputation_benefit) +
                            ", b_P=" + format_double(cell.patient_benefit) + ") failed: " + e.what());
    }
  });
  return grid;
}

std::string grid_csv_header() {
  std::string h = "b_R,b_P";
  for (int i = 0; i < kNumProfiles; ++i) h += ",f_" + profile_of(i).label();
  h += ",coop_public,coop_private,coop_patient";
  return h;
}

namespace {

constexpr int kCsvColumns = 2 + kNumProfiles + 3;

double parse_field(std::string_view s, int line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw FormatError("grid line " + std::to_string(line_no) + ": cannot parse '" + std::string(s) + "'");
  return v;
}

// Rows/cols from the row-major b_R, b_P sequence.
void infer_shape(SweepGrid& grid) {
  if (grid.cells.empty()) throw FormatError("grid has no cells");
  int cols = 1;
  while (cols < static_cast<int>(grid.cells.size()) &&
         grid.cells[static_cast<std::size_t>(cols)].reputation_benefit == grid.cells[0].reputation_benefit)
    ++cols;
  if (grid.cells.size() % static_cast<std::size_t>(cols) != 0) throw FormatError("grid is not rectangular");
  grid.cols = cols;
  grid.rows = static_cast<int>(grid.cells.size()) / cols;
}

}  // namespace

void emit_grid(std::ostream& out, const SweepGrid& grid, GridFormat format) {
  if (format == GridFormat::Csv) {
    out << grid_csv_header() << '\n';
    for (const auto& cell : grid.cells) {
      out << format_double(cell.reputation_benefit) << ',' << format_double(cell.patient_benefit);
      for (int i = 0; i < kNumProfiles; ++i) out << ',' << format_double(cell.frequencies(i));
      for (double c : cell.cooperation) out << ',' << format_double(c);
      out << '\n';
    }
    return;
  }
  nlohmann::ordered_json doc;
  doc["rows"] = grid.rows;
  doc["cols"] = grid.cols;
  doc["profiles"] = nlohmann::ordered_json::array();
  for (int i = 0; i < kNumProfiles; ++i) doc["profiles"].push_back(profile_of(i).label());
  auto& cells = doc["cells"] = nlohmann::ordered_json::array();
  for (const auto& cell : grid.cells) {
    nlohmann::ordered_json c;
    c["b_R"] = cell.reputation_benefit;
    c["b_P"] = cell.patient_benefit;
    c["frequencies"] = std::vector<double>(cell.frequencies.data(), cell.frequencies.data() + kNumProfiles);
    c["coop_public"] = cell.cooperation[0];
    c["coop_private"] = cell.cooperation[1];
    c["coop_patient"] = cell.cooperation[2];
    cells.push_back(std::move(c));
  }
  out << doc.dump(2) << '\n';
}

std::string emit_grid(const SweepGrid& grid, GridFormat format) {
  std::ostringstream out;
  emit_grid(out, grid, format);
  return out.str();
}

SweepGrid parse_grid(const std::string& text, GridFormat format) {
  SweepGrid grid;
  if (format == GridFormat::Csv) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      if (line_no == 1) {
        if (line != grid_csv_header()) throw FormatError("unexpected grid header");
        continue;
      }
      std::vector<double> values;
      std::string_view rest(line);
      while (true) {
        const auto comma = rest.find(',');
        values.push_back(parse_field(rest.substr(0, comma), line_no));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      if (static_cast<int>(values.size()) != kCsvColumns)
        throw FormatError("grid line " + std::to_string(line_no) + ": expected " + std::to_string(kCsvColumns) +
                          " fields");
      SweepCell cell;
      cell.reputation_benefit = values[0];
      cell.patient_benefit = values[1];
      for (int i = 0; i < kNumProfiles; ++i) cell.frequencies(i) = values[static_cast<std::size_t>(2 + i)];
      for (int q = 0; q < 3; ++q) cell.cooperation[q] = values[static_cast<std::size_t>(2 + kNumProfiles + q)];
      grid.cells.push_back(cell);
    }
    infer_shape(grid);
    return grid;
  }
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& c : doc.at("cells")) {
      SweepCell cell;
      cell.reputation_benefit = c.at("b_R").get<double>();
      cell.patient_benefit = c.at("b_P").get<double>();
      const auto freqs = c.at("frequencies").get<std::vector<double>>();
      if (freqs.size() != kNumProfiles) throw FormatError("cell needs 8 frequencies");
      for (int i = 0; i < kNumProfiles; ++i) cell.frequencies(i) = freqs[static_cast<std::size_t>(i)];
      cell.cooperation = {c.at("coop_public").get<double>(), c.at("coop_private").get<double>(),
                          c.at("coop_patient").get<double>()};
      grid.cells.push_back(cell);
    }
    grid.rows = doc.at("rows").get<int>();
    grid.cols = doc.at("cols").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed grid JSON: ") + e.what());
  }
  if (static_cast<std::size_t>(grid.rows * grid.cols) != grid.cells.size())
    throw FormatError("grid dimensions do not match cell count");
  return grid;
}

}  // namespace healthgame
