#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "hplateau/errors.hpp"
#include "hplateau/group_algebra.hpp"

namespace hplateau {

namespace {

// Reads whitespace-separated tokens, dropping '#' comments.
std::istringstream strip_comments(std::istream& in) {
  std::ostringstream body;
  std::string line;
  while (std::getline(in, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    body << line << '\n';
  }
  return std::istringstream(body.str());
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  return in;
}

}  // namespace

FiniteGroup read_group_table(std::istream& in) {
  auto body = strip_comments(in);
  long n = 0;
  if (!(body >> n) || n < 1) throw Error(Errc::parse_error, "group table: missing or bad order");
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b)
      if (!(body >> table[a][b]))
        throw Error(Errc::parse_error, "group table: expected " + std::to_string(n * n) + " entries");
  std::string extra;
  if (body >> extra) throw Error(Errc::parse_error, "group table: trailing token '" + extra + "'");
  return FiniteGroup::from_table(std::move(table));
}

FiniteGroup read_group_table_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_group_table(in);
}

LengthSpectrum read_length_spectrum(std::istream& in, const FiniteGroup& group) {
  std::vector<double> lambda(group.class_count(), -1.0);
  lambda[0] = 0.0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream row(line);
    int cls = 0;
    double value = 0.0;
    if (!(row >> cls)) continue;
    if (!(row >> value))
      throw Error(Errc::parse_error, "length spectrum line " + std::to_string(line_no));
    if (cls < 0 || cls >= group.class_count())
      throw Error(Errc::unknown_class, "length spectrum line " + std::to_string(line_no) +
                                           ": class " + std::to_string(cls));
    lambda[cls] = value;
  }
  return LengthSpectrum::create(group, std::move(lambda));
}

LengthSpectrum read_length_spectrum_file(const std::string& path, const FiniteGroup& group) {
  auto in = open_or_throw(path);
  return read_length_spectrum(in, group);
}

void write_group_table(std::ostream& out, const FiniteGroup& group) {
  out << group.order() << '\n';
  for (const auto& row : group.table()) {
    for (std::size_t b = 0; b < row.size(); ++b) out << (b ? " " : "") << row[b];
    out << '\n';
  }
}

void write_length_spectrum(std::ostream& out, const LengthSpectrum& lengths) {
  out << std::setprecision(17);
  for (int c = 0; c < lengths.size(); ++c) out << c << ' ' << lengths[c] << '\n';
}

}  // namespace hplateau
