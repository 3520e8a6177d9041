#include "dcu/io.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace dcu {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void parse_fail(const std::string& name, int line,
                             const std::string& what) {
  throw Error(ErrorCode::ParseError,
              name + ":" + std::to_string(line) + ": " + what);
}

[[noreturn]] void invalid(const std::string& name, const std::string& what) {
  throw Error(ErrorCode::InvalidMetric, name + ": " + what);
}

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

double dist(const Vec3& a, const Vec3& b) {
  double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Assigns dense edge ids to the unordered vertex pairs of embedded faces
// (first-appearance order) and checks that the complex is closed: every
// pair must be shared by exactly two face sides.
std::vector<FaceSpec> glue_by_vertex_pairs(
    const std::vector<std::array<int, 3>>& tris, const std::string& name) {
  std::map<std::pair<int, int>, EdgeId> ids;
  std::vector<int> uses;
  std::vector<FaceSpec> faces(tris.size());
  for (size_t f = 0; f < tris.size(); f++) {
    faces[f].v = {tris[f][0], tris[f][1], tris[f][2]};
    for (int k = 0; k < 3; k++) {
      int a = tris[f][k], b = tris[f][(k + 1) % 3];
      auto key = std::minmax(a, b);
      auto [it, fresh] = ids.try_emplace(key, static_cast<EdgeId>(ids.size()));
      if (fresh) uses.push_back(0);
      faces[f].e[k] = it->second;
      uses[it->second]++;
    }
  }
  for (size_t e = 0; e < uses.size(); e++) {
    if (uses[e] == 1)
      throw Error(ErrorCode::OpenBoundary,
                  name + ": the mesh has boundary (an edge with one side); "
                         "closed surfaces are required");
    if (uses[e] > 2)
      throw Error(ErrorCode::NonManifold,
                  name + ": an edge is shared by " + std::to_string(uses[e]) +
                      " faces");
  }
  return faces;
}

ParsedMesh from_embedding(const std::vector<Vec3>& pts,
                          const std::vector<std::array<int, 3>>& tris,
                          const std::string& name) {
  std::vector<FaceSpec> faces = glue_by_vertex_pairs(tris, name);
  MarkedSurface m =
      MarkedSurface::build(static_cast<int>(pts.size()), std::move(faces));
  PLMetric d{std::vector<double>(m.edge_count(), 0.0)};
  for (EdgeId e = 0; e < m.edge_count(); e++) {
    auto ab = m.endpoints(e);
    d[e] = dist(pts[ab[0]], pts[ab[1]]);
  }
  require_valid_metric(m, d);
  return ParsedMesh{std::move(m), std::move(d), std::nullopt, std::nullopt};
}

// Line-based reader that skips blanks/comments and tracks line numbers for
// error messages.
struct LineReader {
  std::istringstream in;
  std::string name;
  int line = 0;

  LineReader(const std::string& text, std::string name_)
      : in(text), name(std::move(name_)) {}

  bool next(std::string& out, char comment) {
    std::string raw;
    while (std::getline(in, raw)) {
      line++;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      size_t pos = raw.find(comment);
      if (pos != std::string::npos) raw.erase(pos);
      size_t begin = raw.find_first_not_of(" \t");
      if (begin == std::string::npos) continue;
      out = raw;
      return true;
    }
    return false;
  }
};

ParsedMesh parse_off(const std::string& text, const std::string& name) {
  LineReader rd(text, name);
  std::string s;
  if (!rd.next(s, '#')) parse_fail(name, rd.line, "empty OFF file");
  {
    std::istringstream hdr(s);
    std::string magic;
    hdr >> magic;
    if (magic != "OFF")
      parse_fail(name, rd.line, "expected OFF header, got '" + magic + "'");
  }
  if (!rd.next(s, '#')) parse_fail(name, rd.line, "missing count line");
  long nv = 0, nf = 0, ne = 0;
  {
    std::istringstream counts(s);
    if (!(counts >> nv >> nf >> ne) || nv <= 0 || nf <= 0)
      parse_fail(name, rd.line, "bad vertex/face counts");
  }
  std::vector<Vec3> pts(nv);
  for (long i = 0; i < nv; i++) {
    if (!rd.next(s, '#')) parse_fail(name, rd.line, "unexpected end of file");
    std::istringstream vs(s);
    if (!(vs >> pts[i].x >> pts[i].y >> pts[i].z))
      parse_fail(name, rd.line, "bad vertex line");
  }
  std::vector<std::array<int, 3>> tris(nf);
  for (long f = 0; f < nf; f++) {
    if (!rd.next(s, '#')) parse_fail(name, rd.line, "unexpected end of file");
    std::istringstream fs(s);
    long arity = 0;
    if (!(fs >> arity)) parse_fail(name, rd.line, "bad face line");
    if (arity != 3)
      throw Error(ErrorCode::NonTriangular,
                  name + ":" + std::to_string(rd.line) + ": face " +
                      std::to_string(f) + " has " + std::to_string(arity) +
                      " sides; only triangles are supported");
    for (int k = 0; k < 3; k++) {
      long idx = -1;
      if (!(fs >> idx) || idx < 0 || idx >= nv)
        parse_fail(name, rd.line, "face vertex index out of range");
      tris[f][k] = static_cast<int>(idx);
    }
  }
  return from_embedding(pts, tris, name);
}

ParsedMesh parse_obj(const std::string& text, const std::string& name) {
  LineReader rd(text, name);
  std::vector<Vec3> pts;
  std::vector<std::array<int, 3>> tris;
  std::string s;
  while (rd.next(s, '#')) {
    std::istringstream ls(s);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z))
        parse_fail(name, rd.line, "bad vertex line");
      pts.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        // "i", "i/t", "i//n", "i/t/n"; negative means relative to the end.
        std::string head = tok.substr(0, tok.find('/'));
        char* end = nullptr;
        long v = std::strtol(head.c_str(), &end, 10);
        if (end == head.c_str() || *end != '\0')
          parse_fail(name, rd.line, "bad face token '" + tok + "'");
        long resolved = v > 0 ? v - 1 : static_cast<long>(pts.size()) + v;
        if (resolved < 0 || resolved >= static_cast<long>(pts.size()))
          parse_fail(name, rd.line, "face vertex index out of range");
        idx.push_back(static_cast<int>(resolved));
      }
      if (idx.size() != 3)
        throw Error(ErrorCode::NonTriangular,
                    name + ":" + std::to_string(rd.line) + ": face " +
                        std::to_string(tris.size()) + " has " +
                        std::to_string(idx.size()) +
                        " sides; only triangles are supported");
      tris.push_back({idx[0], idx[1], idx[2]});
    }
    // Everything else (vn, vt, usemtl, o, g, s, mtllib, ...) is ignored.
  }
  if (tris.empty()) parse_fail(name, rd.line, "no faces found");
  return from_embedding(pts, tris, name);
}

double number_field(const json& j, const std::string& name,
                    const std::string& where) {
  if (j.is_string()) return parse_double(j.get<std::string>(), where);
  if (j.is_number()) return j.get<double>();
  invalid(name, where + " must be a number or decimal string");
}

std::vector<double> number_array(const json& j, const std::string& name,
                                 const std::string& where, size_t expect) {
  if (!j.is_array() || (expect != 0 && j.size() != expect))
    invalid(name, where + " must be an array" +
                      (expect ? " of length " + std::to_string(expect) : ""));
  std::vector<double> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); i++)
    out.push_back(
        number_field(j[i], name, where + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double(const std::string& text, const std::string& where) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw Error(ErrorCode::InvalidMetric,
                where + ": '" + text + "' is not a finite number");
  return v;
}

MeshFormat format_from_path(const std::string& path) {
  auto ends_with = [&](const std::string& suffix) {
    return path.size() >= suffix.size() &&
           path.compare(path.size() - suffix.size(), suffix.size(), suffix) ==
               0;
  };
  if (ends_with(".off") || ends_with(".OFF")) return MeshFormat::Off;
  if (ends_with(".obj") || ends_with(".OBJ")) return MeshFormat::Obj;
  if (ends_with(".json") || ends_with(".JSON")) return MeshFormat::MetricJson;
  throw Error(ErrorCode::ParseError,
              path + ": unknown mesh format (expected .off, .obj or .json)");
}

MetricDocument parse_metric_json(const std::string& text,
                                 const std::string& name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw Error(ErrorCode::ParseError, name + ": " + err.what());
  }
  if (!j.is_object()) invalid(name, "top level must be an object");
  if (j.value("format", "") != "dcu-metric/1")
    invalid(name, "missing or unsupported \"format\" (want \"dcu-metric/1\")");

  MetricDocument doc;
  if (!j.contains("vertices") || !j["vertices"].is_number_integer() ||
      (doc.vertices = j["vertices"].get<int>()) <= 0)
    invalid(name, "\"vertices\" must be a positive integer");

  if (!j.contains("faces") || !j["faces"].is_array() || j["faces"].empty())
    invalid(name, "\"faces\" must be a non-empty array");
  const json& jf = j["faces"];
  doc.faces.resize(jf.size());
  for (size_t f = 0; f < jf.size(); f++) {
    if (!jf[f].is_array() || jf[f].size() != 3)
      invalid(name, "faces[" + std::to_string(f) +
                       "] must be a triple of vertex ids");
    for (int k = 0; k < 3; k++) {
      if (!jf[f][k].is_number_integer())
        invalid(name, "faces[" + std::to_string(f) + "] has a non-integer id");
      doc.faces[f].v[k] = jf[f][k].get<int>();
      doc.faces[f].e[k] = -1;
    }
  }

  if (!j.contains("gluing") || !j["gluing"].is_array())
    invalid(name, "\"gluing\" must be an array of side pairs");
  const json& jg = j["gluing"];
  for (size_t e = 0; e < jg.size(); e++) {
    const std::string where = "gluing[" + std::to_string(e) + "]";
    if (!jg[e].is_array() || jg[e].size() != 2)
      invalid(name, where + " must pair exactly two sides");
    for (const json& side : jg[e]) {
      if (!side.is_array() || side.size() != 2 ||
          !side[0].is_number_integer() || !side[1].is_number_integer())
        invalid(name, where + " sides must be [face, side] integer pairs");
      int f = side[0].get<int>(), k = side[1].get<int>();
      if (f < 0 || f >= static_cast<int>(doc.faces.size()) || k < 0 || k > 2)
        invalid(name, where + " references face " + std::to_string(f) +
                          " side " + std::to_string(k) + " out of range");
      if (doc.faces[f].e[k] != -1)
        invalid(name, where + " glues face " + std::to_string(f) + " side " +
                          std::to_string(k) + " twice");
      doc.faces[f].e[k] = static_cast<EdgeId>(e);
    }
  }
  for (size_t f = 0; f < doc.faces.size(); f++)
    for (int k = 0; k < 3; k++)
      if (doc.faces[f].e[k] == -1)
        invalid(name, "face " + std::to_string(f) + " side " +
                          std::to_string(k) + " is not glued");

  if (!j.contains("lengths"))
    invalid(name, "\"lengths\" is required");
  doc.lengths = number_array(j["lengths"], name, "lengths", jg.size());
  for (size_t e = 0; e < doc.lengths.size(); e++)
    if (!(doc.lengths[e] > 0.0))
      invalid(name, "lengths[" + std::to_string(e) + "] must be positive");

  if (j.contains("target_curvature"))
    doc.target_curvature = number_array(j["target_curvature"], name,
                                        "target_curvature", doc.vertices);
  if (j.contains("conformal_factors"))
    doc.conformal_factors = number_array(j["conformal_factors"], name,
                                         "conformal_factors", doc.vertices);
  return doc;
}

std::string serialize_metric(const MetricDocument& doc) {
  ordered_json j;
  j["format"] = "dcu-metric/1";
  j["vertices"] = doc.vertices;
  ordered_json faces = ordered_json::array();
  for (const FaceSpec& f : doc.faces) faces.push_back({f.v[0], f.v[1], f.v[2]});
  j["faces"] = std::move(faces);

  // gluing[e] lists the two (face, side) records carrying edge id e,
  // ascending, so serialization is canonical.
  std::vector<std::vector<std::array<int, 2>>> sides(doc.lengths.size());
  for (size_t f = 0; f < doc.faces.size(); f++)
    for (int k = 0; k < 3; k++)
      sides[doc.faces[f].e[k]].push_back({static_cast<int>(f), k});
  ordered_json gluing = ordered_json::array();
  for (const auto& pair : sides) {
    ordered_json entry = ordered_json::array();
    for (const auto& side : pair) entry.push_back({side[0], side[1]});
    gluing.push_back(std::move(entry));
  }
  j["gluing"] = std::move(gluing);

  ordered_json lengths = ordered_json::array();
  for (double l : doc.lengths) lengths.push_back(format_double(l));
  j["lengths"] = std::move(lengths);

  auto optional_array = [&](const char* key,
                            const std::optional<std::vector<double>>& vals) {
    if (!vals) return;
    ordered_json arr = ordered_json::array();
    for (double v : *vals) arr.push_back(format_double(v));
    j[key] = std::move(arr);
  };
  optional_array("target_curvature", doc.target_curvature);
  optional_array("conformal_factors", doc.conformal_factors);
  return j.dump(2) + "\n";
}

MetricDocument document_from(
    const MarkedSurface& m, const PLMetric& d,
    const std::optional<std::vector<double>>& target_curvature,
    const std::optional<std::vector<double>>& conformal_factors) {
  MetricDocument doc;
  doc.vertices = m.vertex_count();
  doc.faces = m.faces();
  doc.lengths = d.lengths;
  doc.target_curvature = target_curvature;
  doc.conformal_factors = conformal_factors;
  return doc;
}

ParsedMesh realize(const MetricDocument& doc) {
  MarkedSurface m = MarkedSurface::build(doc.vertices, doc.faces);
  PLMetric d{doc.lengths};
  require_valid_metric(m, d);
  return ParsedMesh{std::move(m), std::move(d), doc.target_curvature,
                    doc.conformal_factors};
}

ParsedMesh parse_mesh_file(const std::string& path) {
  return parse_mesh_file(path, format_from_path(path));
}

ParsedMesh parse_mesh_file(const std::string& path, MeshFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::ParseError, path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  switch (format) {
    case MeshFormat::Off:
      return parse_off(text, path);
    case MeshFormat::Obj:
      return parse_obj(text, path);
    case MeshFormat::MetricJson:
      return realize(parse_metric_json(text, path));
  }
  throw Error(ErrorCode::ParseError, path + ": unknown format");
}

}  // namespace dcu
