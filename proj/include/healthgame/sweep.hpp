#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "healthgame/game_model.hpp"
#include "healthgame/sml_chain.hpp"

namespace healthgame {

// Evenly spaced values min .. max inclusive. A single point requires min == max.
struct Axis {
  double min = 0.0;
  double max = 4.0;
  int points = 21;

  void validate(const char* name) const;
  double at(int i) const;
};

enum class ModelVariant { Baseline, Punishment };

std::string_view to_string(ModelVariant v);
std::optional<ModelVariant> parse_variant(std::string_view s);

/// How a loaded table depends on the swept parameters:
///   table(b_R, b_P) = base + b_R * per_reputation_benefit + b_P * per_patient_benefit
struct AffineSubstitution {
  PayoffTable per_reputation_benefit;
  PayoffTable per_patient_benefit;
};

struct LoadedTableSource {
  PayoffTable base;
  std::optional<AffineSubstitution> rule;  // sweeping without a rule is rejected
};

struct SweepSpec {
  Axis reputation_benefit;  // b_R, outer (row) axis
  Axis patient_benefit;     // b_P, inner axis
  GameParams params;        // every other symbol; b_R and b_P are overwritten per cell
  ModelVariant variant = ModelVariant::Baseline;
  std::optional<LoadedTableSource> loaded;  // nullopt: reference family

  void validate() const;
  // Payoff table of one cell, punishment applied if the variant asks for it.
  PayoffTable table_at(double b_r, double b_p) const;
};

struct SweepCell {
  double reputation_benefit = 0.0;
  double patient_benefit = 0.0;
  StationaryDistribution frequencies = StationaryDistribution::Zero();  // profile index order
  std::array<double, 3> cooperation{};                                   // per-population marginals

  friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

struct SweepGrid {
  int rows = 0;  // b_R points
  int cols = 0;  // b_P points
  std::vector<SweepCell> cells;  // row-major: b_R outer, b_P inner

  const SweepCell& at(int row, int col) const { return cells.at(static_cast<std::size_t>(row * cols + col)); }

  friend bool operator==(const SweepGrid&, const SweepGrid&) = default;
};

/// Stationary frequencies at every (b_R, b_P) cell, computed on up to `jobs`
/// threads. A failing cell aborts the sweep with its coordinates in the message.
SweepGrid run_sweep(const SweepSpec& spec, int jobs = 1);

enum class GridFormat { Csv, Json };

// CSV header: b_R,b_P,f_DDD,...,f_CCC,coop_public,coop_private,coop_patient
std::string grid_csv_header();
void emit_grid(std::ostream& out, const SweepGrid& grid, GridFormat format);
std::string emit_grid(const SweepGrid& grid, GridFormat format);
SweepGrid parse_grid(const std::string& text, GridFormat format);

}  // namespace healthgame
