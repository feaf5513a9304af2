#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "psk/net.hpp"
#include "psk/report.hpp"

namespace psk {

using json = nlohmann::json;

inline json net_to_json(const NetPatch& net) {
  json elements = json::array();
  for (int i = 0; i < net.rows; ++i)
    for (int j = 0; j < net.cols; ++j) {
      const ContactElement& e = net.at(i, j);
      elements.push_back({{"i", i},
                          {"j", j},
                          {"point", {e.p.x(), e.p.y(), e.p.z()}},
                          {"normal", {e.n.x(), e.n.y(), e.n.z()}}});
    }
  return {{"rows", net.rows}, {"cols", net.cols}, {"elements", elements}};
}

namespace detail {

inline Vec3 json_vec3(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 3) throw GeometryError(ErrorCode::format_error, what + " must be a 3-array");
  Vec3 out;
  for (int k = 0; k < 3; ++k) {
    if (!v[k].is_number()) throw GeometryError(ErrorCode::format_error, what + " entries must be numbers");
    out[k] = v[k].get<double>();
  }
  return out;
}

inline int json_int(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_integer())
    throw GeometryError(ErrorCode::format_error, std::string("missing integer '") + key + "'");
  return doc[key].get<int>();
}

}  // namespace detail

inline NetPatch net_from_json(const json& doc) {
  if (!doc.is_object()) throw GeometryError(ErrorCode::format_error, "net file must be an object");
  const int rows = detail::json_int(doc, "rows"), cols = detail::json_int(doc, "cols");
  if (rows <= 0 || cols <= 0) throw GeometryError(ErrorCode::format_error, "rows and cols must be positive");
  if (!doc.contains("elements") || !doc["elements"].is_array())
    throw GeometryError(ErrorCode::format_error, "missing 'elements'");
  const json& els = doc["elements"];
  if (els.size() != static_cast<size_t>(rows) * cols)
    throw GeometryError(ErrorCode::format_error, "expected " + std::to_string(rows * cols) + " elements, got " +
                                                     std::to_string(els.size()));
  NetPatch net(rows, cols);
  std::vector<bool> seen(els.size(), false);
  for (const json& e : els) {
    if (!e.is_object()) throw GeometryError(ErrorCode::format_error, "element must be an object");
    const int i = detail::json_int(e, "i"), j = detail::json_int(e, "j");
    if (i < 0 || j < 0 || i >= rows || j >= cols)
      throw GeometryError(ErrorCode::format_error, "index (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
    const size_t k = net.index(i, j);
    if (seen[k]) throw GeometryError(ErrorCode::format_error, "duplicate index (" + std::to_string(i) + "," + std::to_string(j) + ")");
    seen[k] = true;
    const Vec3 p = detail::json_vec3(e.value("point", json()), "point");
    const Vec3 n = detail::json_vec3(e.value("normal", json()), "normal");
    if (std::abs(n.norm() - 1.0) > 1e-9)
      throw GeometryError(ErrorCode::format_error, "normal at (" + std::to_string(i) + "," + std::to_string(j) + ") is not unit");
    net.elements[k] = {p, n};
  }
  return net;
}

inline json report_to_json(const Report& r) {
  json checks = json::array(), metrics = json::array();
  for (const Check& c : r.checks) {
    json o = {{"name", c.name}, {"passed", c.passed}, {"residual", c.residual}, {"tolerance", c.tolerance}};
    o["at"] = c.at ? json{c.at->first, c.at->second} : json(nullptr);
    checks.push_back(std::move(o));
  }
  for (const Metric& m : r.metrics) {
    json o = {{"name", m.name}, {"value", m.value}};
    o["at"] = m.at ? json{m.at->first, m.at->second} : json(nullptr);
    metrics.push_back(std::move(o));
  }
  return {{"kind", r.kind}, {"passed", r.passed()}, {"checks", checks}, {"metrics", metrics}};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline NetPatch load_net(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw GeometryError(ErrorCode::format_error, path + ": " + e.what());
  }
  return net_from_json(doc);
}

// json dumps doubles with 17 significant digits, enough to round-trip exactly.
inline std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

inline void save_net(const NetPatch& net, const std::string& path) { write_file(path, dump_json(net_to_json(net))); }

// One v and one vn per element (row-major), quad faces (i,j) (i+1,j) (i+1,j+1) (i,j+1).
inline std::string to_obj(const NetPatch& net) {
  std::string out;
  char buf[256];
  for (const auto& e : net.elements) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", e.p.x(), e.p.y(), e.p.z());
    out += buf;
  }
  for (const auto& e : net.elements) {
    std::snprintf(buf, sizeof buf, "vn %.17g %.17g %.17g\n", e.n.x(), e.n.y(), e.n.z());
    out += buf;
  }
  const auto id = [&](int i, int j) { return net.index(i, j) + 1; };
  for (int i = 0; i + 1 < net.rows; ++i)
    for (int j = 0; j + 1 < net.cols; ++j) {
      const size_t a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      std::snprintf(buf, sizeof buf, "f %zu//%zu %zu//%zu %zu//%zu %zu//%zu\n", a, a, b, b, c, c, d, d);
      out += buf;
    }
  return out;
}

}  // namespace psk
