#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hplateau/errors.hpp"
#include "hplateau/pharmonic.hpp"

namespace hplateau {

namespace {

void put_le(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(buf), 8);
}

double get_le(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw Error(Errc::parse_error, "field dump is truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_field(const std::string& path, const GridMap& u) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open " + path);
  const auto& d = u.dims();
  std::ostringstream header;
  header << std::setprecision(17) << u.nu() << ' ' << d[0] << ' ' << d[1] << ' ' << d[2] << ' ' << u.h()
         << '\n';
  out << header.str();
  for (double v : u.values()) put_le(out, v);
  if (!out) throw Error(Errc::io_error, "write failed for " + path);
}

GridMap read_field(const std::string& path, const Domain& domain) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::istringstream hs(line);
  int nu = 0, n1 = 0, n2 = 0, n3 = 0;
  double h = 0.0;
  if (!(hs >> nu >> n1 >> n2 >> n3 >> h)) throw Error(Errc::parse_error, "bad field header in " + path);
  if (n1 != n2 || n2 != n3) throw Error(Errc::parse_error, "only cubic node arrays are supported");
  GridMap u = GridMap::create(domain, n1, nu);
  if (std::abs(u.h() - h) > 1e-12 * h)
    throw Error(Errc::parse_error, "grid spacing in " + path + " does not match the domain");
  for (double& v : u.values()) v = get_le(in);
  return u;
}

void write_measure_csv(std::ostream& out, const GridMap& grid, const EnergyMeasure& m) {
  out << "i,j,k,density\n";
  out << std::setprecision(17);
  for (std::size_t c = 0; c < m.density.size(); ++c) {
    if (!m.active[c]) continue;
    const auto q = grid.coords(c);
    out << q[0] << ',' << q[1] << ',' << q[2] << ',' << m.density[c] << '\n';
  }
}

}  // namespace hplateau
