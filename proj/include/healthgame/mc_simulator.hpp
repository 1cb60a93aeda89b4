#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "healthgame/game_model.hpp"
#include "healthgame/sml_chain.hpp"

namespace healthgame {

/// Platform-independent random source. std::mt19937_64 is bit-exact by the
/// standard; the distributions on top of it are implemented here because
/// the library ones are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 output function. Replicate 0 runs on the base seed itself;
// replicate i > 0 on splitmix64(base + i * 0x9E3779B97F4A7C15).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t index);

struct SimConfig {
  int population_size = 100;
  double selection = 0.1;
  double exploration = 1e-4;  // mu
  std::uint64_t steps = 10'000'000;
  std::uint64_t burn_in = 100'000;
  std::uint64_t seed = 42;
  // Starting profile; every agent of each population plays its strategy.
  StrategyProfile initial{};

  void validate() const;
};

struct SimState {
  std::array<int, 3> cooperators{};  // per population, in 0..N

  bool monomorphic(int population_size) const;
  // Only meaningful when monomorphic.
  StrategyProfile profile() const;
};

struct OccupancyReport {
  // Share of recorded updates spent in each monomorphic profile (index order).
  ProfileVector<double> occupancy = ProfileVector<double>::Zero();
  // Share of recorded updates with all three populations monomorphic.
  double monomorphic_time = 0.0;
  std::array<double, 3> cooperator_fraction{};
  std::uint64_t updates = 0;  // recorded, i.e. steps - burn_in
  std::uint64_t seed = 0;

  // occupancy renormalised over monomorphic time; comparable to the
  // stationary distribution of the small-mutation-limit chain.
  ProfileVector<double> conditional_occupancy() const;
};

/// Expected payoff of strategy `s` in population `pop` against the current
/// composition of the other two populations.
double expected_payoff(const PayoffTable& table, const SimState& state, int population_size, Population pop,
                       Strategy s);

/// Asynchronous imitation dynamics with exploration. Each update picks a
/// population uniformly; with probability mu a uniformly chosen agent takes
/// a uniformly random strategy, otherwise a focal agent imitates a distinct
/// random model with probability fermi(beta, pi_model, pi_focal).
/// Statistics are taken after every update past burn_in.
OccupancyReport run_simulation(const PayoffTable& table, const SimConfig& cfg);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct ReplicateReport {
  std::vector<OccupancyReport> runs;
  std::array<Estimate, kNumProfiles> occupancy{};
  std::array<Estimate, kNumProfiles> conditional_occupancy{};
  Estimate monomorphic_time;
  std::array<Estimate, 3> cooperator_fraction{};
  std::uint64_t base_seed = 0;
};

/// `runs` independent simulations seeded by replicate_seed(cfg.seed, i),
/// executed on up to `jobs` threads; results do not depend on `jobs`.
ReplicateReport replicate(const PayoffTable& table, const SimConfig& cfg, int runs, int jobs = 1);

}  // namespace healthgame
