#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

#include <Eigen/Core>

#include "healthgame/error.hpp"

namespace healthgame {

// Canonical order used for every serialized profile: Public, Private, Patient.
enum class Population : std::uint8_t { Public = 0, Private = 1, Patient = 2 };

inline constexpr std::array<Population, 3> kPopulations{Population::Public, Population::Private,
                                                        Population::Patient};

constexpr int to_index(Population p) { return static_cast<int>(p); }

constexpr std::string_view to_string(Population p) {
  switch (p) {
    case Population::Public: return "public";
    case Population::Private: return "private";
    case Population::Patient: return "patient";
  }
  return "?";
}

// D is bit 0, C is bit 1 in the profile index.
enum class Strategy : std::uint8_t { D = 0, C = 1 };

constexpr Strategy flip(Strategy s) { return s == Strategy::C ? Strategy::D : Strategy::C; }
constexpr char to_char(Strategy s) { return s == Strategy::C ? 'C' : 'D'; }

inline constexpr int kNumProfiles = 8;

// One strategy per population. index() = 4*public + 2*private + patient, so
// CCC -> 7 and DDD -> 0.
struct StrategyProfile {
  Strategy public_sector = Strategy::D;
  Strategy private_sector = Strategy::D;
  Strategy patient = Strategy::D;

  constexpr int index() const {
    return 4 * static_cast<int>(public_sector) + 2 * static_cast<int>(private_sector) +
           static_cast<int>(patient);
  }

  static constexpr StrategyProfile from_index(int i) {
    if (i < 0 || i >= kNumProfiles) throw InvalidArgument("profile index out of range: " + std::to_string(i));
    return {static_cast<Strategy>((i >> 2) & 1), static_cast<Strategy>((i >> 1) & 1),
            static_cast<Strategy>(i & 1)};
  }

  constexpr Strategy at(Population p) const {
    switch (p) {
      case Population::Public: return public_sector;
      case Population::Private: return private_sector;
      case Population::Patient: return patient;
    }
    return Strategy::D;
  }

  constexpr StrategyProfile with(Population p, Strategy s) const {
    StrategyProfile out = *this;
    switch (p) {
      case Population::Public: out.public_sector = s; break;
      case Population::Private: out.private_sector = s; break;
      case Population::Patient: out.patient = s; break;
    }
    return out;
  }

  constexpr int cooperators() const {
    return static_cast<int>(public_sector) + static_cast<int>(private_sector) + static_cast<int>(patient);
  }

  std::string label() const { return {to_char(public_sector), to_char(private_sector), to_char(patient)}; }

  friend constexpr bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
};

constexpr int profile_index(StrategyProfile p) { return p.index(); }
constexpr StrategyProfile profile_of(int i) { return StrategyProfile::from_index(i); }

// Parses "CDC" style labels; nullopt on anything else.
std::optional<StrategyProfile> parse_profile(std::string_view label);

constexpr int hamming(StrategyProfile a, StrategyProfile b) {
  return __builtin_popcount(static_cast<unsigned>(a.index() ^ b.index()));
}

// The single population whose strategy differs; only meaningful at distance 1.
constexpr std::optional<Population> differing_population(StrategyProfile a, StrategyProfile b) {
  if (hamming(a, b) != 1) return std::nullopt;
  for (Population p : kPopulations)
    if (a.at(p) != b.at(p)) return p;
  return std::nullopt;
}

// Profiles in the conventional display order CCC, CCD, ..., DDD.
inline constexpr std::array<int, kNumProfiles> kDisplayOrder{7, 6, 5, 4, 3, 2, 1, 0};

/// Scalar model parameters. Symbols in the comments are the conventional
/// names used in the model description and on the command line.
struct GameParams {
  double patient_benefit = 2.0;     // b_P
  double reputation_benefit = 1.0;  // b_R
  double patient_cost = 1.0;        // c_I
  double public_cost = 1.0;         // c_T
  double private_cost = 1.0;        // c_M
  double epsilon = 0.2;             // scales b_R into a provider's reputation payoff
  double punish_cost = 0.5;         // u, paid by the patient per punished provider
  double fine = 1.5;                // v, charged to each punished provider
  int population_size = 100;        // N, per population
  double selection = 0.1;           // beta

  // Throws InvalidArgument naming the first offending field.
  void validate() const;

  friend bool operator==(const GameParams&, const GameParams&) = default;
};

/// Payoff triple for each of the 8 profiles. Rows are profile indices,
/// columns are populations in canonical order. Every entry is finite.
template <typename Scalar>
class BasicPayoffTable {
 public:
  using Matrix = Eigen::Matrix<Scalar, kNumProfiles, 3>;

  BasicPayoffTable() : entries_(Matrix::Zero()) {}

  explicit BasicPayoffTable(const Matrix& entries) : entries_(entries) {
    for (int i = 0; i < kNumProfiles; ++i)
      for (int p = 0; p < 3; ++p)
        if (!std::isfinite(static_cast<double>(entries_(i, p))))
          throw InvalidArgument("non-finite payoff for profile " + profile_of(i).label() + " (" +
                                std::string(to_string(static_cast<Population>(p))) + ")");
  }

  static BasicPayoffTable zero() { return BasicPayoffTable(); }

  Scalar operator()(Population pop, StrategyProfile profile) const {
    return entries_(profile.index(), to_index(pop));
  }

  Eigen::Matrix<Scalar, 1, 3> row(StrategyProfile profile) const { return entries_.row(profile.index()); }

  const Matrix& entries() const { return entries_; }

  template <typename Other>
  BasicPayoffTable<Other> cast() const {
    return BasicPayoffTable<Other>(entries_.template cast<Other>());
  }

  friend bool operator==(const BasicPayoffTable& a, const BasicPayoffTable& b) {
    return a.entries_ == b.entries_;
  }

 private:
  Matrix entries_;
};

using PayoffTable = BasicPayoffTable<double>;

template <typename Scalar>
Scalar payoff(const BasicPayoffTable<Scalar>& table, Population pop, StrategyProfile profile) {
  return table(pop, profile);
}

/// Peer punishment as a table transform: wherever the patient cooperates,
/// each defecting provider loses `fine` and the patient pays `cost` once per
/// provider punished. Profiles with a defecting patient are untouched.
template <typename Scalar>
BasicPayoffTable<Scalar> apply_punishment(const BasicPayoffTable<Scalar>& base, std::type_identity_t<Scalar> cost,
                                          std::type_identity_t<Scalar> fine) {
  if (!(cost >= Scalar(0)) || !(fine >= Scalar(0)))
    throw InvalidArgument("punishment cost and fine must be non-negative");
  auto out = base.entries();
  for (int i = 0; i < kNumProfiles; ++i) {
    const StrategyProfile s = profile_of(i);
    if (s.patient != Strategy::C) continue;
    for (Population provider : {Population::Public, Population::Private}) {
      if (s.at(provider) != Strategy::D) continue;
      out(i, to_index(provider)) -= fine;
      out(i, to_index(Population::Patient)) -= cost;
    }
  }
  return BasicPayoffTable<Scalar>(out);
}

/// Reference payoff family (a documented stand-in, not a published table):
///
///   provider p in {Public, Private}, own service cost c_p (c_T resp. c_M):
///     cooperates: epsilon * b_R - c_p
///     defects:    0
///   patient:
///     cooperates: b_P - c_I if at least one provider cooperates, else -c_I
///     defects:    0
///
/// DDD is (0, 0, 0) for every parameter set.
template <typename Scalar = double>
BasicPayoffTable<Scalar> build_reference_table(const GameParams& params) {
  params.validate();
  const Scalar reputation = Scalar(params.epsilon) * Scalar(params.reputation_benefit);
  typename BasicPayoffTable<Scalar>::Matrix m;
  for (int i = 0; i < kNumProfiles; ++i) {
    const StrategyProfile s = profile_of(i);
    auto provider = [&](Population p, double cost) -> Scalar {
      return s.at(p) == Strategy::C ? reputation - Scalar(cost) : Scalar(0);
    };
    m(i, 0) = provider(Population::Public, params.public_cost);
    m(i, 1) = provider(Population::Private, params.private_cost);
    const bool any_provider_c = s.public_sector == Strategy::C || s.private_sector == Strategy::C;
    m(i, 2) = s.patient == Strategy::C
                  ? (any_provider_c ? Scalar(params.patient_benefit) : Scalar(0)) - Scalar(params.patient_cost)
                  : Scalar(0);
  }
  return BasicPayoffTable<Scalar>(m);
}

}  // namespace healthgame
