#pragma once

#include <iosfwd>
#include <string>

#include "healthgame/sml_chain.hpp"

namespace healthgame {

/// Graphviz DOT rendering of the profile cube: one node per profile with its
/// stationary mass; one arrow per edge labelled with rho*N of the dominant
/// direction. Blue points toward cooperation, red toward defection, and
/// neutral edges are dashed and undirected.
void write_dot(std::ostream& out, const EdgeClassification& edges, const StationaryDistribution& dist,
               int population_size);
std::string to_dot(const EdgeClassification& edges, const StationaryDistribution& dist, int population_size);

}  // namespace healthgame
