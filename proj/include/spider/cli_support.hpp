#pragma once

#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "spider/diffusion.hpp"

namespace spider {

/// Command-line point syntax: "x@leg", with "0" for the vertex.
SpiderPoint parse_point(const std::string& s);
std::string format_point(SpiderPoint p);

/// Probabilities accept fraction syntax ("1/3") so sums validate exactly.
double parse_fraction(const std::string& s);
std::vector<double> parse_probabilities(const std::string& s);

using Cell = std::variant<std::string, double, long long>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

enum class OutputFormat { table, csv };

OutputFormat parse_format(const std::string& s);

/// Shortest decimal that round-trips the double.
std::string format_exact(double v);
/// Fixed number of significant digits (default output precision is 6).
std::string format_sig(double v, int sig);

/// table: aligned columns; csv: RFC-4180 quoting, header row, LF-terminated.
void emit_table(const Table& t, OutputFormat fmt, std::ostream& out,
                int precision = 6);

/// Flat key=value config file with section prefixes (model.n=3). '#' starts a
/// comment. Flags given on the command line override file values.
std::map<std::string, std::string> load_config(const std::string& path);

}  // namespace spider
