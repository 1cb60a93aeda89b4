#pragma once

#include <algorithm>
#include <array>
#include <type_traits>
#include <cmath>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "healthgame/evolution.hpp"
#include "healthgame/game_model.hpp"

namespace healthgame {

template <typename Scalar>
using ProfileVector = Eigen::Matrix<Scalar, kNumProfiles, 1>;

// Stationary distributions and other per-profile quantities.
using StationaryDistribution = ProfileVector<double>;

template <typename Scalar>
using ProfileMatrix = Eigen::Matrix<Scalar, kNumProfiles, kNumProfiles>;

/// Row-stochastic transition matrix of the small-mutation-limit chain over
/// the 8 monomorphic profiles, states in profile_index order.
template <typename Scalar>
class BasicMarkovChain {
 public:
  using Matrix = ProfileMatrix<Scalar>;

  // Takes the off-diagonal rates; the diagonal is filled so rows sum to 1.
  static BasicMarkovChain from_rates(const Matrix& rates) {
    Matrix m = rates;
    for (int i = 0; i < kNumProfiles; ++i) {
      m(i, i) = Scalar(0);
      m(i, i) = Scalar(1) - m.row(i).sum();
    }
    return BasicMarkovChain(m);
  }

  // Validates row sums (1e-12), entry range and the one-flip sparsity pattern.
  explicit BasicMarkovChain(const Matrix& m) : matrix_(m) {
    using std::abs;
    for (int i = 0; i < kNumProfiles; ++i) {
      if (abs(m.row(i).sum() - Scalar(1)) > Scalar(1e-12))
        throw InvalidArgument("row " + profile_of(i).label() + " does not sum to 1");
      for (int j = 0; j < kNumProfiles; ++j) {
        if (!(m(i, j) >= Scalar(0) && m(i, j) <= Scalar(1)))
          throw InvalidArgument("transition entry outside [0, 1]");
        if (i != j && m(i, j) != Scalar(0) && hamming(profile_of(i), profile_of(j)) != 1)
          throw InvalidArgument("transition " + profile_of(i).label() + "->" + profile_of(j).label() +
                                " changes more than one population");
      }
    }
  }

  const Matrix& matrix() const { return matrix_; }
  Scalar operator()(StrategyProfile from, StrategyProfile to) const { return matrix_(from.index(), to.index()); }

 private:
  Matrix matrix_;
};

using MarkovChain = BasicMarkovChain<double>;

/// Rare mutant arises in one of the three populations with probability 1/3
/// and fixes with the invasion's fixation probability:
///   M[s -> s'] = rho(s -> s') / 3 for Hamming(s, s') = 1, zero otherwise.
template <typename Scalar>
BasicMarkovChain<Scalar> build_transition_matrix(const BasicPayoffTable<Scalar>& table, int population_size,
                                                 std::type_identity_t<Scalar> selection) {
  if (population_size < 2) throw InvalidArgument("N must be >= 2");
  if (!(selection >= Scalar(0)) || !std::isfinite(static_cast<double>(selection)))
    throw InvalidArgument("beta must be finite and >= 0");
  ProfileMatrix<Scalar> rates = ProfileMatrix<Scalar>::Zero();
  for (int i = 0; i < kNumProfiles; ++i) {
    const StrategyProfile from = profile_of(i);
    for (Population pop : kPopulations) {
      const StrategyProfile to = from.with(pop, flip(from.at(pop)));
      const auto ctx = BasicInvasionContext<Scalar>::between(table, from, to, population_size, selection);
      rates(i, to.index()) = fixation_probability(ctx) / Scalar(3);
    }
  }
  return BasicMarkovChain<Scalar>::from_rates(rates);
}

/// Unique left fixed vector pi M = pi, sum(pi) = 1, by Gaussian elimination
/// in the Grassmann-Taksar-Heyman form: pivots are formed from off-diagonal
/// sums, so there is no cancellation against the 1 - outflow diagonal.
/// Throws InvalidArgument if the chain is reducible.
template <typename Scalar>
ProfileVector<Scalar> stationary_distribution(const BasicMarkovChain<Scalar>& chain) {
  ProfileMatrix<Scalar> a = chain.matrix();
  constexpr int n = kNumProfiles;
  // Elimination only reads off-diagonals and is invariant to a common factor.
  // Scaling to a unit maximum makes equal rates exactly 1, so the neutral
  // chain comes out exactly uniform.
  Scalar largest = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) largest = std::max(largest, a(i, j));
  if (largest > Scalar(0)) a /= largest;
  for (int k = n - 1; k > 0; --k) {
    const Scalar outflow = a.row(k).head(k).sum();
    if (!(outflow > Scalar(0)))
      throw InvalidArgument("transition chain is reducible; no unique stationary distribution");
    a.col(k).head(k) /= outflow;
    a.topLeftCorner(k, k).noalias() += a.col(k).head(k) * a.row(k).head(k);
  }
  ProfileVector<Scalar> pi;
  pi(0) = Scalar(1);
  for (int k = 1; k < n; ++k) pi(k) = pi.head(k).dot(a.col(k).head(k));
  return pi / pi.sum();
}

/// Independent check on stationary_distribution: repeated squaring of M,
/// kept in the form M^(2^t) = I + G with the diagonal of G rebuilt from its
/// off-diagonals each step, until all rows agree to `tol`.
template <typename Scalar>
ProfileVector<Scalar> stationary_distribution_power(const BasicMarkovChain<Scalar>& chain,
                                                    std::type_identity_t<Scalar> tol = Scalar(1e-14),
                                                    int max_squarings = 4000) {
  constexpr int n = kNumProfiles;
  ProfileMatrix<Scalar> g = chain.matrix();
  auto rebuild_diagonal = [](ProfileMatrix<Scalar>& x) {
    for (int i = 0; i < n; ++i) {
      x(i, i) = Scalar(0);
      x(i, i) = -x.row(i).sum();
    }
  };
  rebuild_diagonal(g);
  for (int t = 0; t < max_squarings; ++t) {
    const ProfileMatrix<Scalar> m = ProfileMatrix<Scalar>::Identity() + g;
    Scalar spread = 0;
    for (int j = 0; j < n; ++j) spread = std::max(spread, m.col(j).maxCoeff() - m.col(j).minCoeff());
    if (spread <= tol) {
      ProfileVector<Scalar> pi = m.colwise().sum().transpose() / Scalar(n);
      return pi / pi.sum();
    }
    // Off-diagonal of (I+G)^2 without forming the 1 + G_ii diagonal products
    // inside sums that would swamp small rates.
    ProfileMatrix<Scalar> next;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        Scalar s = g(i, j) * ((Scalar(1) + g(i, i)) + (Scalar(1) + g(j, j)));
        for (int l = 0; l < n; ++l)
          if (l != i && l != j) s += g(i, l) * g(l, j);
        next(i, j) = s;
      }
    }
    rebuild_diagonal(next);
    g = next;
  }
  throw InvalidArgument("power iteration did not converge");
}

enum class EdgeClass { TowardCooperation, TowardDefection, Neutral };

constexpr std::string_view to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::TowardCooperation: return "toward-cooperation";
    case EdgeClass::TowardDefection: return "toward-defection";
    case EdgeClass::Neutral: return "neutral";
  }
  return "?";
}

/// One undirected edge of the profile cube. `lower` has population `pop`
/// defecting, `upper` has it cooperating.
template <typename Scalar>
struct ClassifiedEdge {
  StrategyProfile lower;
  StrategyProfile upper;
  Population pop;
  Scalar rho_up;    // D -> C invasion, lower -> upper
  Scalar rho_down;  // C -> D invasion, upper -> lower
  EdgeClass cls;
};

template <typename Scalar>
class BasicEdgeClassification {
 public:
  static constexpr int kNumEdges = 12;
  using Edges = std::array<ClassifiedEdge<Scalar>, kNumEdges>;

  explicit BasicEdgeClassification(const Edges& edges) : edges_(edges) {}

  const Edges& edges() const { return edges_; }

  // Total over the 24 directed edges; both directions carry the class of
  // their undirected edge.
  EdgeClass at(StrategyProfile from, StrategyProfile to) const {
    for (const auto& e : edges_)
      if ((e.lower == from && e.upper == to) || (e.lower == to && e.upper == from)) return e.cls;
    throw InvalidArgument(from.label() + "->" + to.label() + " is not an edge of the profile graph");
  }

 private:
  Edges edges_;
};

using EdgeClassification = BasicEdgeClassification<double>;

/// Neutral when both directions are within tol * (1/N) of 1/N; otherwise
/// the edge points toward the direction with the larger fixation probability.
template <typename Scalar>
BasicEdgeClassification<Scalar> classify_edges(const BasicPayoffTable<Scalar>& table, int population_size,
                                               std::type_identity_t<Scalar> selection,
                                               std::type_identity_t<Scalar> tol = Scalar(0.01)) {
  using std::abs;
  if (!(tol > Scalar(0))) throw InvalidArgument("neutrality tolerance must be > 0");
  const Scalar neutral = Scalar(1) / Scalar(population_size);
  typename BasicEdgeClassification<Scalar>::Edges edges;
  int e = 0;
  for (int i = 0; i < kNumProfiles; ++i) {
    const StrategyProfile lower = profile_of(i);
    for (Population pop : kPopulations) {
      if (lower.at(pop) != Strategy::D) continue;
      const StrategyProfile upper = lower.with(pop, Strategy::C);
      const Scalar up = fixation_probability(
          BasicInvasionContext<Scalar>::between(table, lower, upper, population_size, selection));
      const Scalar down = fixation_probability(
          BasicInvasionContext<Scalar>::between(table, upper, lower, population_size, selection));
      EdgeClass cls;
      if (abs(up - neutral) <= tol * neutral && abs(down - neutral) <= tol * neutral) cls = EdgeClass::Neutral;
      else if (up > down) cls = EdgeClass::TowardCooperation;
      else cls = EdgeClass::TowardDefection;
      edges[e++] = {lower, upper, pop, up, down, cls};
    }
  }
  return BasicEdgeClassification<Scalar>(edges);
}

template <typename Scalar>
struct CooperationMetrics {
  ProfileVector<Scalar> frequencies;
  Scalar full_cooperation;                 // mass on CCC
  std::array<Scalar, 3> marginal;          // per population, mass where it plays C
};

template <typename Scalar>
CooperationMetrics<Scalar> cooperation_metrics(const ProfileVector<Scalar>& dist) {
  CooperationMetrics<Scalar> out{dist, dist(StrategyProfile{Strategy::C, Strategy::C, Strategy::C}.index()), {}};
  for (Population pop : kPopulations) {
    Scalar m = 0;
    for (int i = 0; i < kNumProfiles; ++i)
      if (profile_of(i).at(pop) == Strategy::C) m += dist(i);
    out.marginal[to_index(pop)] = m;
  }
  return out;
}

}  // namespace healthgame
