#pragma once

// Hand-built tables and independent oracles shared by the test binaries.
// The oracles deliberately avoid the library's fixation and stationary code.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "healthgame/game_model.hpp"
#include "healthgame/sml_chain.hpp"

namespace healthgame::testing {

// payoff(pop, s) = f(pop, s) for every entry.
template <typename F>
PayoffTable table_from(F&& f) {
  PayoffTable::Matrix m;
  for (int i = 0; i < kNumProfiles; ++i)
    for (Population p : kPopulations) m(i, to_index(p)) = f(p, profile_of(i));
  return PayoffTable(m);
}

// Each population gains `gain` by cooperating, in every context.
inline PayoffTable cooperation_dominant(double gain = 2.0) {
  return table_from([gain](Population p, StrategyProfile s) { return s.at(p) == Strategy::C ? gain : 0.0; });
}

inline PayoffTable defection_dominant(double gain = 2.0) {
  return table_from([gain](Population p, StrategyProfile s) { return s.at(p) == Strategy::D ? gain : 0.0; });
}

// Public prefers C, private prefers D, the patient cooperates only
// alongside a cooperating public provider.
inline PayoffTable mixed_table() {
  return table_from([](Population p, StrategyProfile s) {
    switch (p) {
      case Population::Public: return s.public_sector == Strategy::C ? 1.5 : 0.0;
      case Population::Private: return s.private_sector == Strategy::D ? 1.0 : 0.0;
      case Population::Patient:
        return s.patient == Strategy::C ? (s.public_sector == Strategy::C ? 1.0 : -1.0) : 0.0;
    }
    return 0.0;
  });
}

// Matching pennies between Public (wants to match the patient) and Patient
// (wants to mismatch Public); Private mildly prefers C.
inline PayoffTable cyclic_table() {
  return table_from([](Population p, StrategyProfile s) {
    const bool match = s.public_sector == s.patient;
    switch (p) {
      case Population::Public: return match ? 1.0 : -1.0;
      case Population::Private: return s.private_sector == Strategy::C ? 0.5 : 0.0;
      case Population::Patient: return match ? -1.0 : 1.0;
    }
    return 0.0;
  });
}

// Providers prefer defection, the patient prefers cooperation.
inline PayoffTable provider_defection_table() {
  return table_from([](Population p, StrategyProfile s) {
    if (p == Population::Patient) return s.patient == Strategy::C ? 1.0 : 0.0;
    return s.at(p) == Strategy::D ? 1.0 : 0.0;
  });
}

inline PayoffTable random_table(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  PayoffTable::Matrix m;
  for (int i = 0; i < kNumProfiles; ++i)
    for (int p = 0; p < 3; ++p) m(i, p) = u(rng);
  return PayoffTable(m);
}

// Fixation probability of one mutant as the absorption probability of the
// birth-death chain on {0..N}, solved as a dense linear system in long double:
// h(0) = 0, h(N) = 1, h(k) = T+ h(k+1) + T- h(k-1) + (1 - T+ - T-) h(k).
inline long double fixation_by_absorption(int n, double beta, double pi_mutant, double pi_resident) {
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const long double z = static_cast<long double>(beta) * (static_cast<long double>(pi_mutant) - pi_resident);
  const long double up = 1.0L / (1.0L + std::exp(-z));
  const long double down = 1.0L / (1.0L + std::exp(z));
  Mat a = Mat::Zero(n + 1, n + 1);
  Vec b = Vec::Zero(n + 1);
  a(0, 0) = 1;
  a(n, n) = 1;
  b(n) = 1;
  for (int k = 1; k < n; ++k) {
    const long double pair = static_cast<long double>(k) * (n - k) / (static_cast<long double>(n) * n);
    a(k, k) = pair * (up + down);
    a(k, k + 1) = -pair * up;
    a(k, k - 1) = -pair * down;
  }
  const Vec h = a.fullPivLu().solve(b);
  return h(1);
}

// Transition matrix entry by entry from the absorption oracle.
inline ProfileMatrix<double> brute_transition_matrix(const PayoffTable& table, int n, double beta) {
  ProfileMatrix<double> m = ProfileMatrix<double>::Zero();
  for (int i = 0; i < kNumProfiles; ++i) {
    for (int j = 0; j < kNumProfiles; ++j) {
      if (hamming(profile_of(i), profile_of(j)) != 1) continue;
      const Population pop = *differing_population(profile_of(i), profile_of(j));
      const double pi_mut = table(pop, profile_of(j));
      const double pi_res = table(pop, profile_of(i));
      m(i, j) = static_cast<double>(fixation_by_absorption(n, beta, pi_mut, pi_res) / 3.0L);
    }
    m(i, i) = 1.0 - m.row(i).sum();
  }
  return m;
}

// Left eigenvector for eigenvalue 1 via Eigen's general eigensolver.
inline ProfileVector<double> stationary_by_eigen(const ProfileMatrix<double>& m) {
  Eigen::EigenSolver<ProfileMatrix<double>> solver(m.transpose());
  int best = 0;
  for (int i = 1; i < kNumProfiles; ++i)
    if (std::abs(solver.eigenvalues()(i) - 1.0) < std::abs(solver.eigenvalues()(best) - 1.0)) best = i;
  ProfileVector<double> v = solver.eigenvectors().col(best).real();
  return v / v.sum();
}

}  // namespace healthgame::testing
