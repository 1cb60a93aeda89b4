#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "healthgame/game_model.hpp"

namespace healthgame {

// Payoff table documents. Both forms hold exactly one record per profile,
// keyed by the label over {C,D} in Public/Private/Patient order.
//
//   csv:   profile,public,private,patient      (header line optional)
//          CCC,0,0,1
//   json:  {"CCC": [0, 0, 1], ...}
//          or {"CCC": {"public": 0, "private": 0, "patient": 1}, ...}
enum class TableFormat { Csv, Json };

// .json selects Json; anything else is read as Csv.
TableFormat table_format_for(const std::filesystem::path& path);

// Throws FormatError naming the offending profile (or line) on malformed
// input, a missing or duplicate profile, or a non-finite payoff.
PayoffTable load_table(std::istream& in, TableFormat format);
PayoffTable load_table(const std::string& text, TableFormat format);

// Doubles are written in shortest round-trip form, so load(save(t)) == t.
void save_table(std::ostream& out, const PayoffTable& table, TableFormat format);
std::string save_table(const PayoffTable& table, TableFormat format);

PayoffTable load_table_file(const std::filesystem::path& path);
void save_table_file(const std::filesystem::path& path, const PayoffTable& table);

// Locale-independent number formatting shared by every text output.
std::string format_double(double x);

}  // namespace healthgame
