#include "healthgame/game_model.hpp"

namespace healthgame {

std::optional<StrategyProfile> parse_profile(std::string_view label) {
  if (label.size() != 3) return std::nullopt;
  std::array<Strategy, 3> s{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (label[i] == 'C') s[i] = Strategy::C;
    else if (label[i] == 'D') s[i] = Strategy::D;
    else return std::nullopt;
  }
  return StrategyProfile{s[0], s[1], s[2]};
}

namespace {

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) throw InvalidArgument(std::string(name) + " must be finite");
}

}  // namespace

void GameParams::validate() const {
  require_finite(patient_benefit, "b_P");
  require_finite(reputation_benefit, "b_R");
  require_finite(patient_cost, "c_I");
  require_finite(public_cost, "c_T");
  require_finite(private_cost, "c_M");
  require_finite(epsilon, "epsilon");
  require_finite(punish_cost, "u");
  require_finite(fine, "v");
  require_finite(selection, "beta");
  if (epsilon < 0.0 || epsilon > 1.0) throw InvalidArgument("epsilon must lie in [0, 1]");
  if (punish_cost < 0.0) throw InvalidArgument("u must be >= 0");
  if (fine < 0.0) throw InvalidArgument("v must be >= 0");
  if (population_size < 2) throw InvalidArgument("N must be >= 2");
  if (selection < 0.0) throw InvalidArgument("beta must be >= 0");
}

}  // namespace healthgame
