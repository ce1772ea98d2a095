#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "hplateau/chains.hpp"
#include "hplateau/errors.hpp"

namespace hplateau {

using nlohmann::json;

std::string chain_to_json(const Chain& chain, int indent) {
  json j;
  j["vertices"] = json::array();
  for (const auto& v : chain.vertices) {
    j["vertices"].push_back({{"x", v.pos.x()},
                             {"y", v.pos.y()},
                             {"z", v.pos.z()},
                             {"kind", v.kind == VertexKind::boundary ? "boundary" : "interior"}});
  }
  j["edges"] = json::array();
  for (const auto& e : chain.edges) j["edges"].push_back({{"u", e.u}, {"v", e.v}, {"class", e.cls}});
  if (!chain.provenance.empty()) j["provenance"] = chain.provenance;
  return j.dump(indent);
}

Chain chain_from_json(const std::string& text) {
  Chain chain;
  try {
    const json j = json::parse(text);
    for (const auto& v : j.at("vertices")) {
      ChainVertex cv;
      cv.pos = Vec3(v.at("x").get<double>(), v.at("y").get<double>(), v.at("z").get<double>());
      const auto kind = v.value("kind", std::string("interior"));
      if (kind == "boundary") {
        cv.kind = VertexKind::boundary;
      } else if (kind == "interior") {
        cv.kind = VertexKind::interior;
      } else {
        throw Error(Errc::parse_error, "vertex kind '" + kind + "'");
      }
      chain.vertices.push_back(cv);
    }
    for (const auto& e : j.at("edges"))
      chain.edges.push_back({e.at("u").get<int>(), e.at("v").get<int>(), e.at("class").get<int>()});
    chain.provenance = j.value("provenance", std::string());
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("chain JSON: ") + e.what());
  }
  return chain;
}

Chain read_chain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return chain_from_json(buf.str());
}

BoundaryChargeSpec read_spec_csv(std::istream& in) {
  BoundaryChargeSpec spec;
  std::string line;
  int line_no = 0;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0, y = 0, z = 0;
    int cls = 0;
    if (!(row >> x >> y >> z >> cls)) {
      std::istringstream first(line);
      double probe = 0;
      if (spec.empty() && !header_skipped && !(first >> probe)) {
        header_skipped = true;
        continue;
      }
      throw Error(Errc::parse_error, "spec CSV line " + std::to_string(line_no));
    }
    spec.points.emplace_back(x, y, z);
    spec.classes.push_back(cls);
  }
  return spec;
}

BoundaryChargeSpec read_spec_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  return read_spec_csv(in);
}

void write_spec_csv(std::ostream& out, const BoundaryChargeSpec& spec) {
  out << std::setprecision(17);
  for (std::size_t i = 0; i < spec.size(); ++i)
    out << spec.points[i].x() << ',' << spec.points[i].y() << ',' << spec.points[i].z() << ','
        << spec.classes[i] << '\n';
}

}  // namespace hplateau
