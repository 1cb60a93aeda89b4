#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "healthgame/game_model.hpp"

namespace healthgame {

/// Imitation probability 1 / (1 + exp(-beta * (pi_model - pi_focal))).
/// Evaluated on the branch whose exponent is non-positive, so it never
/// overflows; the result saturates at 0 or 1 only for |beta * diff| > ~745.
template <typename Scalar>
Scalar fermi(Scalar beta, Scalar pi_model, Scalar pi_focal) {
  using std::exp;
  const Scalar z = beta * (pi_model - pi_focal);
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
  const Scalar e = exp(z);
  return e / (Scalar(1) + e);
}

// log(fermi(...)), finite for every finite input.
template <typename Scalar>
Scalar log_fermi(Scalar beta, Scalar pi_model, Scalar pi_focal) {
  using std::exp;
  using std::log1p;
  const Scalar z = beta * (pi_model - pi_focal);
  if (z >= Scalar(0)) return -log1p(exp(-z));
  return z - log1p(exp(z));
}

/// A single mutant of strategy `mutant` arising in population `focal`,
/// whose residents play `flip(mutant)`. The other two populations stay
/// fixed at their strategies in `background` for the whole invasion.
template <typename Scalar>
struct BasicInvasionContext {
  Population focal = Population::Public;
  Strategy mutant = Strategy::C;
  Strategy resident = Strategy::D;
  StrategyProfile background{};
  BasicPayoffTable<Scalar> table{};
  int population_size = 2;
  Scalar selection = Scalar(0);

  // Invasion that carries the chain from `from` to `to` (Hamming distance 1).
  static BasicInvasionContext between(const BasicPayoffTable<Scalar>& table, StrategyProfile from,
                                      StrategyProfile to, int population_size, Scalar selection) {
    const auto pop = differing_population(from, to);
    if (!pop) throw InvalidArgument("profiles " + from.label() + " and " + to.label() + " differ in more than one population");
    return {*pop, to.at(*pop), from.at(*pop), from, table, population_size, selection};
  }

  void validate() const {
    if (mutant == resident) throw InvalidArgument("mutant and resident strategies must differ");
    if (population_size < 2) throw InvalidArgument("population size must be >= 2");
    if (!(selection >= Scalar(0)) || !std::isfinite(static_cast<double>(selection)))
      throw InvalidArgument("selection intensity must be finite and >= 0");
  }
};

using InvasionContext = BasicInvasionContext<double>;

template <typename Scalar>
struct InvasionPayoffs {
  Scalar mutant;
  Scalar resident;
};

/// Focal-population payoffs of mutant and resident. Opponents come from the
/// other (monomorphic) populations, so neither depends on the mutant count.
template <typename Scalar>
InvasionPayoffs<Scalar> invasion_payoffs(const BasicInvasionContext<Scalar>& ctx) {
  ctx.validate();
  return {ctx.table(ctx.focal, ctx.background.with(ctx.focal, ctx.mutant)),
          ctx.table(ctx.focal, ctx.background.with(ctx.focal, ctx.resident))};
}

template <typename Scalar>
struct StepProbs {
  Scalar plus;   // mutant count k -> k + 1
  Scalar minus;  // k -> k - 1
};

/// Birth-death rates with k mutants among N: a resident imitates a mutant
/// (plus) or a mutant imitates a resident (minus), each weighted by the
/// pairing frequency (k/N)((N-k)/N).
template <typename Scalar>
StepProbs<Scalar> step_probs(int k, int population_size, Scalar beta, Scalar pi_mutant, Scalar pi_resident) {
  if (population_size < 2 || k < 1 || k > population_size - 1)
    throw InvalidArgument("mutant count " + std::to_string(k) + " outside [1, N-1]");
  const Scalar n = population_size;
  const Scalar pairing = (Scalar(k) / n) * (Scalar(population_size - k) / n);
  return {pairing * fermi(beta, pi_mutant, pi_resident), pairing * fermi(beta, pi_resident, pi_mutant)};
}

/// log rho with rho = 1 / (1 + sum_{i=1}^{N-1} prod_{k=1}^{i} T-(k)/T+(k)).
/// Products are sums of logs, the outer sum is log-sum-exp, so the result
/// stays finite where rho itself underflows.
template <typename Scalar>
Scalar log_fixation_probability_sum(int population_size, Scalar beta, Scalar pi_mutant, Scalar pi_resident) {
  using std::exp;
  using std::log;
  if (population_size < 2) throw InvalidArgument("population size must be >= 2");
  // The pairing factor is common to T+ and T- and cancels; with payoffs
  // independent of k every factor of the product is the same.
  const Scalar log_ratio = log_fermi(beta, pi_resident, pi_mutant) - log_fermi(beta, pi_mutant, pi_resident);
  std::vector<Scalar> log_terms(static_cast<std::size_t>(population_size));
  for (int i = 0; i < population_size; ++i) log_terms[static_cast<std::size_t>(i)] = Scalar(i) * log_ratio;
  Scalar peak = -std::numeric_limits<Scalar>::infinity();
  for (Scalar t : log_terms) peak = std::max(peak, t);
  Scalar acc = 0;
  for (Scalar t : log_terms) acc += exp(t - peak);
  return -(peak + log(acc));
}

template <typename Scalar>
Scalar fixation_probability_sum(int population_size, Scalar beta, Scalar pi_mutant, Scalar pi_resident) {
  using std::exp;
  return exp(log_fixation_probability_sum(population_size, beta, pi_mutant, pi_resident));
}

/// Closed form for a constant ratio gamma = T-/T+ = exp(-beta * diff):
/// rho = (1 - gamma) / (1 - gamma^N), and 1/N when gamma = 1.
template <typename Scalar>
Scalar fixation_probability_closed(int population_size, Scalar beta, Scalar pi_mutant, Scalar pi_resident) {
  using std::exp;
  using std::expm1;
  if (population_size < 2) throw InvalidArgument("population size must be >= 2");
  const Scalar n = population_size;
  const Scalar x = beta * (pi_mutant - pi_resident);
  if (x == Scalar(0)) return Scalar(1) / n;
  if (x > Scalar(0)) return expm1(-x) / expm1(-n * x);
  // Disadvantageous mutant: factor out gamma^{-(N-1)} to stay finite.
  const Scalar y = -x;
  return exp(-(n - Scalar(1)) * y) * expm1(-y) / expm1(-n * y);
}

template <typename Scalar>
Scalar log_fixation_probability_closed(int population_size, Scalar beta, Scalar pi_mutant, Scalar pi_resident) {
  using std::expm1;
  using std::log;
  if (population_size < 2) throw InvalidArgument("population size must be >= 2");
  const Scalar n = population_size;
  const Scalar x = beta * (pi_mutant - pi_resident);
  if (x == Scalar(0)) return -log(n);
  if (x > Scalar(0)) return log(-expm1(-x)) - log(-expm1(-n * x));
  const Scalar y = -x;
  return -(n - Scalar(1)) * y + log(-expm1(-y)) - log(-expm1(-n * y));
}

/// Probability that a single mutant takes over its population.
template <typename Scalar>
Scalar fixation_probability(const BasicInvasionContext<Scalar>& ctx) {
  const auto pi = invasion_payoffs(ctx);
  return fixation_probability_closed(ctx.population_size, ctx.selection, pi.mutant, pi.resident);
}

}  // namespace healthgame
