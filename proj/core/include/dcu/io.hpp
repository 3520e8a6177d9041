#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcu/metric.hpp"
#include "dcu/surface.hpp"

namespace dcu {

// In-memory form of the metric-json format (see docs/metric-json.md):
// faces as vertex triples, edge gluing as an explicit side-pairing list
// (edge id = position in that list), lengths as decimal strings with 17
// significant digits so doubles survive a round trip bit-for-bit.
struct MetricDocument {
  int vertices = 0;
  std::vector<FaceSpec> faces;
  std::vector<double> lengths;
  std::optional<std::vector<double>> target_curvature;
  std::optional<std::vector<double>> conformal_factors;
};

enum class MeshFormat { Off, Obj, MetricJson };

// A parsed input mesh: the combinatorial surface plus its edge lengths and
// whatever optional fields the file carried.
struct ParsedMesh {
  MarkedSurface surface;
  PLMetric metric;
  std::optional<std::vector<double>> target_curvature;
  std::optional<std::vector<double>> conformal_factors;
};

// Shortest decimal round-trip formatting at 17 significant digits.
std::string format_double(double value);
// Strict full-string parse; `where` names the offending field in errors.
double parse_double(const std::string& text, const std::string& where);

// Infers Off/Obj/MetricJson from the file extension (.off/.obj/.json).
// Throws ParseError for unknown extensions.
MeshFormat format_from_path(const std::string& path);

MetricDocument parse_metric_json(const std::string& text,
                                 const std::string& name);
std::string serialize_metric(const MetricDocument& doc);

MetricDocument document_from(
    const MarkedSurface& m, const PLMetric& d,
    const std::optional<std::vector<double>>& target_curvature = std::nullopt,
    const std::optional<std::vector<double>>& conformal_factors = std::nullopt);

// Realizes the document; throws the surface/metric errors on bad data.
ParsedMesh realize(const MetricDocument& doc);

// Reads OFF / OBJ (pure-triangle, closed) or metric-json. Embedded formats
// contribute only their edge lengths; the embedding is discarded. The
// resulting metric is always validated.
// Throws ParseError (with line), NonTriangular, NonManifold, OpenBoundary,
// InvalidMetric.
ParsedMesh parse_mesh_file(const std::string& path);
ParsedMesh parse_mesh_file(const std::string& path, MeshFormat format);

}  // namespace dcu
