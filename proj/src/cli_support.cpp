#include "spider/cli_support.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace spider {

namespace {

double stod_checked(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(what);
  }
}

}  // namespace

SpiderPoint parse_point(const std::string& s) {
  auto at = s.find('@');
  const std::string what = "point '" + s + "': expected x@leg or 0";
  if (at == std::string::npos) {
    if (stod_checked(s, what) != 0.0) throw std::invalid_argument(what);
    return vertex();
  }
  double x = stod_checked(s.substr(0, at), what);
  double leg = stod_checked(s.substr(at + 1), what);
  if (leg < 1.0 || leg != std::floor(leg))
    throw std::invalid_argument("point '" + s + "': bad leg index");
  if (x < 0.0) throw std::invalid_argument("point '" + s + "': x < 0");
  return {x, static_cast<int>(leg)};
}

std::string format_point(SpiderPoint p) {
  if (p.is_vertex()) return "0";
  return format_exact(p.x) + "@" + std::to_string(p.leg);
}

double parse_fraction(const std::string& s) {
  auto slash = s.find('/');
  const std::string what = "number '" + s + "' is malformed";
  if (slash == std::string::npos) return stod_checked(s, what);
  double num = stod_checked(s.substr(0, slash), what);
  double den = stod_checked(s.substr(slash + 1), what);
  if (den == 0.0) throw std::invalid_argument(what);
  return num / den;
}

std::vector<double> parse_probabilities(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_fraction(item));
  if (out.empty()) throw std::invalid_argument("empty probability list");
  return out;
}

OutputFormat parse_format(const std::string& s) {
  if (s == "table") return OutputFormat::table;
  if (s == "csv") return OutputFormat::csv;
  throw std::invalid_argument("format must be 'table' or 'csv'");
}

std::string format_exact(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_sig(double v, int sig) {
  std::ostringstream os;
  os << std::setprecision(sig) << v;
  return os.str();
}

namespace {

std::string cell_text(const Cell& c, int precision) {
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  if (std::holds_alternative<long long>(c))
    return std::to_string(std::get<long long>(c));
  return format_sig(std::get<double>(c), precision);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  q += '"';
  return q;
}

}  // namespace

void emit_table(const Table& t, OutputFormat fmt, std::ostream& out,
                int precision) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(t.header);
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size())
      throw std::invalid_argument("emit_table: row does not match schema");
    std::vector<std::string> r;
    for (const auto& c : row) r.push_back(cell_text(c, precision));
    cells.push_back(std::move(r));
  }

  if (fmt == OutputFormat::csv) {
    for (const auto& row : cells) {
      for (size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << csv_quote(row[i]);
      }
      out << '\n';
    }
    return;
  }

  std::vector<size_t> width(t.header.size(), 0);
  for (const auto& row : cells)
    for (size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());
  for (const auto& row : cells) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << "  ";
      out << std::left << std::setw(static_cast<int>(width[i])) << row[i];
    }
    out << '\n';
  }
}

std::map<std::string, std::string> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto strip = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line is not key=value: " + line);
    kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }
  return kv;
}

}  // namespace spider
