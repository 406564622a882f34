#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hodgekit/deformation.hpp"
#include "hodgekit/group.hpp"
#include "hodgekit/harmonic.hpp"
#include "hodgekit/kms.hpp"
#include "hodgekit/norms.hpp"

namespace hk::io {

using Json = nlohmann::json;  // std::map objects: keys come out sorted

inline constexpr int kSchemaVersion = 1;

struct NormModel {
  DiagNorm norm;
};

/// Dirichlet problem. Boundary values are either all vectors or all norms.
struct GraphModel {
  WeightedGraph graph;
  std::map<std::size_t, QVector> vector_boundary;
  std::map<std::size_t, DiagNorm> norm_boundary;
  bool building_target() const { return !norm_boundary.empty(); }
};

struct RepModel {
  GroupRep rep;
  /// Optional first-order deformation, one matrix per generator.
  std::optional<Cochain> cocycle;
};

struct VoltageGraphModel {
  VoltageGraph graph;
  RepModel rep;
  /// Set when the representation was referenced by file name.
  std::optional<std::string> rep_path;
};

struct ResiduesModel {
  GaussianRational lambda;
  std::vector<ExactWeightResidue> items;
};

using Model = std::variant<NormModel, GraphModel, VoltageGraphModel, RepModel, ResiduesModel>;

struct ModelFile {
  int schema_version = kSchemaVersion;
  Model model;
  std::string kind() const;
};

/// Validates a document. Errors are ValidationError with messages of the
/// form "<json path>: <reason>". Relative rep references in voltage graphs
/// are resolved against `base_dir`.
ModelFile parse_model(const Json& doc, const std::filesystem::path& base_dir = {});
ModelFile parse_model_file(const std::filesystem::path& path);
ModelFile parse_model_text(const std::string& text, const std::filesystem::path& base_dir = {});

Json to_json(const ModelFile& m);
/// Canonical text: two-space indentation, sorted keys, trailing newline.
std::string serialize(const ModelFile& m);

// Building blocks shared with the command line front end.
Json rational_json(const Rational& x);
Json vector_json(const QVector& v);
Json matrix_json(const QMatrix& m);
/// Rationals as strings, other number-field elements as coefficient arrays.
Json element_json(const NFElem& x);
Json kmatrix_json(const KMatrix& m);
Json norm_payload(const DiagNorm& n);
Json rep_payload(const GroupRep& rep);
Json word_json(const Word& w);

}  // namespace hk::io
