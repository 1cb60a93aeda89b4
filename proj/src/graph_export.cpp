#include "healthgame/graph_export.hpp"

#include <ostream>
#include <sstream>

#include "healthgame/table_io.hpp"

namespace healthgame {

void write_dot(std::ostream& out, const EdgeClassification& edges, const StationaryDistribution& dist,
               int population_size) {
  const double n = population_size;
  out << "digraph sml {\n";
  out << "  node [shape=circle];\n";
  for (int i : kDisplayOrder) {
    const auto label = profile_of(i).label();
    out << "  \"" << label << "\" [label=\"" << label << "\\n" << format_double(dist(i)) << "\"];\n";
  }
  for (const auto& e : edges.edges()) {
    const std::string lower = e.lower.label();
    const std::string upper = e.upper.label();
    out << "  ";
    switch (e.cls) {
      case EdgeClass::TowardCooperation:
        out << '"' << lower << "\" -> \"" << upper << "\" [color=blue, label=\"" << format_double(e.rho_up * n)
            << "\"";
        break;
      case EdgeClass::TowardDefection:
        out << '"' << upper << "\" -> \"" << lower << "\" [color=red, label=\"" << format_double(e.rho_down * n)
            << "\"";
        break;
      case EdgeClass::Neutral:
        out << '"' << lower << "\" -> \"" << upper << "\" [style=dashed, dir=none, label=\""
            << format_double(e.rho_up * n) << "/" << format_double(e.rho_down * n) << "\"";
        break;
    }
    out << ", class=\"" << to_string(e.cls) << "\"];\n";
  }
  out << "}\n";
}

std::string to_dot(const EdgeClassification& edges, const StationaryDistribution& dist, int population_size) {
  std::ostringstream out;
  write_dot(out, edges, dist, population_size);
  return out.str();
}

}  // namespace healthgame
