#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rssdloc {

// Fixed-point rendering with a given number of decimals ("-0.000000" is
// printed as "0.000000").
std::string format_fixed(double value, int decimals);

// Numeric CSV with a single header line.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Throws ParseError when the column is missing.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);

}  // namespace rssdloc
