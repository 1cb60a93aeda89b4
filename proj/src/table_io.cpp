#include "healthgame/table_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <cctype>
#include <vector>

#include <nlohmann/json.hpp>

namespace healthgame {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

// Collects rows and enforces totality/uniqueness/finiteness.
class TableAssembler {
 public:
  void add(std::string_view label, const std::array<double, 3>& values) {
    const auto profile = parse_profile(label);
    if (!profile) throw FormatError("unknown profile label '" + std::string(label) + "'");
    const int i = profile->index();
    if (seen_[i]) throw FormatError("duplicate profile " + profile->label());
    for (int p = 0; p < 3; ++p) {
      if (!std::isfinite(values[p]))
        throw FormatError("non-finite " + std::string(to_string(static_cast<Population>(p))) +
                          " payoff for profile " + profile->label());
      m_(i, p) = values[p];
    }
    seen_[i] = true;
  }

  PayoffTable finish() const {
    for (int i : kDisplayOrder)
      if (!seen_[i]) throw FormatError("missing profile " + profile_of(i).label());
    return PayoffTable(m_);
  }

 private:
  PayoffTable::Matrix m_ = PayoffTable::Matrix::Zero();
  std::array<bool, kNumProfiles> seen_{};
};

PayoffTable load_csv(std::istream& in) {
  TableAssembler table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = content.find(',', start);
      fields.push_back(trim(content.substr(start, comma == std::string_view::npos ? comma : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields[0] == "profile") continue;
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != 4)
      throw FormatError(where + " (" + std::string(fields[0]) + "): expected 4 fields, got " +
                        std::to_string(fields.size()));
    std::array<double, 3> values{};
    for (int p = 0; p < 3; ++p) {
      const auto v = parse_double(fields[p + 1]);
      if (!v)
        throw FormatError(where + " (" + std::string(fields[0]) + "): cannot parse '" +
                          std::string(fields[p + 1]) + "' as a number");
      values[p] = *v;
    }
    table.add(fields[0], values);
  }
  return table.finish();
}

double json_number(const nlohmann::json& j, const std::string& label) {
  if (!j.is_number()) throw FormatError("profile " + label + ": payoff is not a number");
  return j.get<double>();
}

PayoffTable load_json(std::istream& in) {
  // nlohmann silently keeps the last of duplicate keys, so duplicates are
  // caught while parsing.
  std::vector<std::string> top_keys;
  auto track = [&top_keys](int depth, nlohmann::json::parse_event_t event, nlohmann::json& parsed) {
    if (event == nlohmann::json::parse_event_t::key && depth == 1) top_keys.push_back(parsed.get<std::string>());
    return true;
  };
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, track);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed JSON table: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("JSON table must be an object keyed by profile");
  for (std::size_t i = 0; i < top_keys.size(); ++i)
    if (std::find(top_keys.begin(), top_keys.begin() + static_cast<std::ptrdiff_t>(i), top_keys[i]) !=
        top_keys.begin() + static_cast<std::ptrdiff_t>(i))
      throw FormatError("duplicate profile " + top_keys[i]);

  TableAssembler table;
  for (const auto& [label, entry] : doc.items()) {
    std::array<double, 3> values{};
    if (entry.is_array()) {
      if (entry.size() != 3) throw FormatError("profile " + label + ": expected 3 payoffs");
      for (int p = 0; p < 3; ++p) values[p] = json_number(entry[p], label);
    } else if (entry.is_object()) {
      for (Population pop : kPopulations) {
        const std::string key(to_string(pop));
        if (!entry.contains(key)) throw FormatError("profile " + label + ": missing '" + key + "' payoff");
        values[to_index(pop)] = json_number(entry.at(key), label);
      }
      if (entry.size() != 3) throw FormatError("profile " + label + ": unexpected extra fields");
    } else {
      throw FormatError("profile " + label + ": expected an array or object of payoffs");
    }
    table.add(label, values);
  }
  return table.finish();
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

TableFormat table_format_for(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".json" ? TableFormat::Json : TableFormat::Csv;
}

PayoffTable load_table(std::istream& in, TableFormat format) {
  return format == TableFormat::Json ? load_json(in) : load_csv(in);
}

PayoffTable load_table(const std::string& text, TableFormat format) {
  std::istringstream in(text);
  return load_table(in, format);
}

void save_table(std::ostream& out, const PayoffTable& table, TableFormat format) {
  if (format == TableFormat::Csv) {
    out << "profile,public,private,patient\n";
    for (int i : kDisplayOrder) {
      const auto s = profile_of(i);
      out << s.label();
      for (Population p : kPopulations) out << ',' << format_double(table(p, s));
      out << '\n';
    }
    return;
  }
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (int i : kDisplayOrder) {
    const auto s = profile_of(i);
    doc[s.label()] = {table(Population::Public, s), table(Population::Private, s), table(Population::Patient, s)};
  }
  out << doc.dump(2) << '\n';
}

std::string save_table(const PayoffTable& table, TableFormat format) {
  std::ostringstream out;
  save_table(out, table, format);
  return out.str();
}

PayoffTable load_table_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open table file " + path.string());
  return load_table(in, table_format_for(path));
}

void save_table_file(const std::filesystem::path& path, const PayoffTable& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write table file " + path.string());
  save_table(out, table, table_format_for(path));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace healthgame
