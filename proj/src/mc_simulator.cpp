#include "healthgame/mc_simulator.hpp"

#include <cmath>

#include "healthgame/evolution.hpp"
#include "healthgame/parallel.hpp"

namespace healthgame {

std::uint64_t Rng::below(std::uint64_t n) {
  // 128-bit multiply; rejection removes the bias for n not a power of two.
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t index) {
  if (index == 0) return base;
  return splitmix64(base + index * 0x9E3779B97F4A7C15ULL);
}

void SimConfig::validate() const {
  if (population_size < 2) throw InvalidArgument("N must be >= 2");
  if (!(selection >= 0.0) || !std::isfinite(selection)) throw InvalidArgument("beta must be finite and >= 0");
  if (!(exploration >= 0.0 && exploration <= 1.0)) throw InvalidArgument("mu must lie in [0, 1]");
  if (steps <= burn_in) throw InvalidArgument("steps must exceed burn-in");
}

bool SimState::monomorphic(int population_size) const {
  for (int k : cooperators)
    if (k != 0 && k != population_size) return false;
  return true;
}

StrategyProfile SimState::profile() const {
  auto s = [this](int p) { return cooperators[p] > 0 ? Strategy::C : Strategy::D; };
  return {s(0), s(1), s(2)};
}

ProfileVector<double> OccupancyReport::conditional_occupancy() const {
  const double total = occupancy.sum();
  if (total <= 0.0) return ProfileVector<double>::Zero();
  return occupancy / total;
}

double expected_payoff(const PayoffTable& table, const SimState& state, int population_size, Population pop,
                       Strategy s) {
  // The two opponent populations in canonical order.
  std::array<Population, 2> others{};
  int o = 0;
  for (Population q : kPopulations)
    if (q != pop) others[o++] = q;
  const double n = population_size;
  const double x0 = state.cooperators[to_index(others[0])] / n;
  const double x1 = state.cooperators[to_index(others[1])] / n;
  const StrategyProfile base = StrategyProfile{}.with(pop, s);
  auto at = [&](Strategy a, Strategy b) { return table(pop, base.with(others[0], a).with(others[1], b)); };
  return x0 * x1 * at(Strategy::C, Strategy::C) + x0 * (1 - x1) * at(Strategy::C, Strategy::D) +
         (1 - x0) * x1 * at(Strategy::D, Strategy::C) + (1 - x0) * (1 - x1) * at(Strategy::D, Strategy::D);
}

OccupancyReport run_simulation(const PayoffTable& table, const SimConfig& cfg) {
  cfg.validate();
  const int n = cfg.population_size;
  Rng rng(cfg.seed);
  SimState state;
  for (Population p : kPopulations) state.cooperators[to_index(p)] = cfg.initial.at(p) == Strategy::C ? n : 0;

  std::array<std::uint64_t, kNumProfiles> mono_counts{};
  std::array<std::uint64_t, 3> coop_sums{};

  for (std::uint64_t step = 0; step < cfg.steps; ++step) {
    const auto p = static_cast<int>(rng.below(3));
    int& k = state.cooperators[p];
    if (rng.bernoulli(cfg.exploration)) {
      const bool was_c = rng.below(static_cast<std::uint64_t>(n)) < static_cast<std::uint64_t>(k);
      const bool now_c = rng.below(2) == 1;
      k += static_cast<int>(now_c) - static_cast<int>(was_c);
    } else {
      // Exchangeable agents: the first k indices are the cooperators.
      const auto focal = rng.below(static_cast<std::uint64_t>(n));
      auto model = rng.below(static_cast<std::uint64_t>(n - 1));
      if (model >= focal) ++model;
      const bool focal_c = focal < static_cast<std::uint64_t>(k);
      const bool model_c = model < static_cast<std::uint64_t>(k);
      if (focal_c != model_c) {
        const auto pop = static_cast<Population>(p);
        const Strategy model_s = model_c ? Strategy::C : Strategy::D;
        const double pi_model = expected_payoff(table, state, n, pop, model_s);
        const double pi_focal = expected_payoff(table, state, n, pop, flip(model_s));
        if (rng.bernoulli(fermi(cfg.selection, pi_model, pi_focal))) k += model_c ? 1 : -1;
      }
    }
    if (step < cfg.burn_in) continue;
    if (state.monomorphic(n)) ++mono_counts[state.profile().index()];
    for (int q = 0; q < 3; ++q) coop_sums[q] += static_cast<std::uint64_t>(state.cooperators[q]);
  }

  OccupancyReport report;
  report.updates = cfg.steps - cfg.burn_in;
  report.seed = cfg.seed;
  const auto recorded = static_cast<double>(report.updates);
  std::uint64_t mono_total = 0;
  for (int i = 0; i < kNumProfiles; ++i) {
    report.occupancy(i) = static_cast<double>(mono_counts[i]) / recorded;
    mono_total += mono_counts[i];
  }
  report.monomorphic_time = static_cast<double>(mono_total) / recorded;
  for (int q = 0; q < 3; ++q)
    report.cooperator_fraction[q] = static_cast<double>(coop_sums[q]) / (recorded * static_cast<double>(n));
  return report;
}

namespace {

Estimate estimate(const std::vector<double>& xs) {
  Estimate e;
  const auto count = static_cast<double>(xs.size());
  for (double x : xs) e.mean += x;
  e.mean /= count;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.std_error = std::sqrt(ss / (count - 1.0) / count);
  }
  return e;
}

}  // namespace

ReplicateReport replicate(const PayoffTable& table, const SimConfig& cfg, int runs, int jobs) {
  if (runs < 1) throw InvalidArgument("runs must be >= 1");
  cfg.validate();
  ReplicateReport out;
  out.base_seed = cfg.seed;
  out.runs.resize(static_cast<std::size_t>(runs));
  parallel_for(out.runs.size(), jobs, [&](std::size_t i) {
    SimConfig c = cfg;
    c.seed = replicate_seed(cfg.seed, i);
    out.runs[i] = run_simulation(table, c);
  });

  auto collect = [&](auto&& get) {
    std::vector<double> xs;
    xs.reserve(out.runs.size());
    for (const auto& r : out.runs) xs.push_back(get(r));
    return estimate(xs);
  };
  for (int i = 0; i < kNumProfiles; ++i) {
    out.occupancy[i] = collect([i](const OccupancyReport& r) { return r.occupancy(i); });
    out.conditional_occupancy[i] = collect([i](const OccupancyReport& r) { return r.conditional_occupancy()(i); });
  }
  out.monomorphic_time = collect([](const OccupancyReport& r) { return r.monomorphic_time; });
  for (int q = 0; q < 3; ++q)
    out.cooperator_fraction[q] = collect([q](const OccupancyReport& r) { return r.cooperator_fraction[q]; });
  return out;
}

}  // namespace healthgame
