#include "hodgekit/model_io.hpp"

#include <fstream>
#include <sstream>

namespace hk::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
  throw ValidationError(path + ": " + reason);
}

// Runs f, prefixing any ValidationError with the document path.
template <class F>
auto at(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind("$", 0) == 0) throw;
    fail(path, what);
  }
}

const Json& field(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing field \"" + key + "\"");
  return *it;
}

void no_extra_fields(const Json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(path, "unknown field \"" + it.key() + "\"");
  }
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

std::size_t count(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned()) fail(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

long integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long>();
}

Rational rational(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a rational string");
  return at(path, [&] { return parse_rational(j.get<std::string>()); });
}

QVector rational_vector(const Json& j, const std::string& path) {
  QVector v;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) v.push_back(rational(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

template <class T, class Entry>
Matrix<T> matrix(const Json& j, const std::string& path, Entry entry) {
  const std::size_t rows = array(j, path).size();
  if (rows == 0) fail(path, "empty matrix");
  const std::size_t cols = array(j[0], path + "[0]").size();
  Matrix<T> m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (array(j[r], rp).size() != cols) fail(rp, "ragged matrix row");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = entry(j[r][c], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

QMatrix rational_matrix(const Json& j, const std::string& path) {
  return matrix<Rational>(j, path, rational);
}

Word word(const Json& j, const std::string& path) {
  Word w;
  for (std::size_t i = 0; i < array(j, path).size(); ++i) {
    const long x = integer(j[i], path + "[" + std::to_string(i) + "]");
    if (x == 0) fail(path + "[" + std::to_string(i) + "]", "letter 0 is not a generator");
    w.push_back(static_cast<int>(x));
  }
  return w;
}

DiagNorm norm_from(const Json& j, const std::string& path) {
  const long p = integer(field(j, "p", path), path + ".p");
  const PrimePlace place = at(path + ".p", [&] { return PrimePlace(p); });
  const QMatrix basis = rational_matrix(field(j, "basis", path), path + ".basis");
  const QVector weights = rational_vector(field(j, "weights", path), path + ".weights");
  if (!basis.square()) fail(path + ".basis", "basis must be square");
  if (basis.rows() != weights.size()) fail(path + ".weights", "one weight per basis vector required");
  return at(path + ".basis", [&] { return DiagNorm(place, basis, weights); });
}

FieldPtr field_from(const Json& doc, const std::string& path) {
  auto it = doc.find("minpoly");
  if (it == doc.end()) return nullptr;
  QVector coeffs = rational_vector(*it, path + ".minpoly");
  return at(path + ".minpoly", [&] { return std::make_shared<const NumberField>(std::move(coeffs)); });
}

NFElem element(const Json& j, const std::string& path, const FieldPtr& f) {
  if (j.is_string()) return NFElem(rational(j, path));
  if (!j.is_array()) fail(path, "expected a rational string or a coefficient array");
  if (!f) fail(path, "number-field entries need a minpoly");
  return at(path, [&] { return nf_normalize(f, rational_vector(j, path)); });
}

KMatrix element_matrix(const Json& j, const std::string& path, const FieldPtr& f) {
  return matrix<NFElem>(j, path, [&](const Json& e, const std::string& p) { return element(e, p, f); });
}

RepModel rep_from(const Json& doc, const std::string& path) {
  const std::size_t s = count(field(doc, "generators", path), path + ".generators");
  std::vector<Word> relators;
  const Json& rels = array(field(doc, "relators", path), path + ".relators");
  for (std::size_t i = 0; i < rels.size(); ++i) relators.push_back(word(rels[i], path + ".relators[" + std::to_string(i) + "]"));
  const GroupPresentation pres = at(path + ".relators", [&] { return GroupPresentation(s, relators); });
  const FieldPtr f = field_from(doc, path);
  std::vector<KMatrix> mats;
  const Json& ms = array(field(doc, "matrices", path), path + ".matrices");
  if (ms.size() != s) fail(path + ".matrices", "one matrix per generator required");
  for (std::size_t i = 0; i < ms.size(); ++i) mats.push_back(element_matrix(ms[i], path + ".matrices[" + std::to_string(i) + "]", f));
  if (f)
    for (auto& m : mats)
      for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
          if (!m(r, c).is_zero() && !m(r, c).field()) m(r, c) = nf_normalize(f, {m(r, c).to_rational()});
  RepModel out{at(path + ".matrices", [&] { return GroupRep(pres, mats); }), std::nullopt};
  if (auto it = doc.find("cocycle"); it != doc.end()) {
    const std::string cp = path + ".cocycle";
    if (array(*it, cp).size() != s) fail(cp, "one matrix per generator required");
    Cochain c;
    for (std::size_t i = 0; i < s; ++i) {
      KMatrix m = element_matrix((*it)[i], cp + "[" + std::to_string(i) + "]", f);
      if (m.rows() != out.rep.rank() || m.cols() != out.rep.rank()) fail(cp, "matrix size differs from the rank");
      c.push_back(std::move(m));
    }
    out.cocycle = std::move(c);
  }
  return out;
}

std::pair<std::size_t, std::vector<Edge>> graph_core(const Json& doc, const std::string& path) {
  const std::size_t n = count(field(doc, "vertices", path), path + ".vertices");
  std::vector<Edge> edges;
  const Json& es = array(field(doc, "edges", path), path + ".edges");
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string ep = path + ".edges[" + std::to_string(i) + "]";
    if (!es[i].is_array() || es[i].size() != 3) fail(ep, "an edge is [tail, head, \"weight\"]");
    edges.push_back({count(es[i][0], ep + "[0]"), count(es[i][1], ep + "[1]"), rational(es[i][2], ep + "[2]")});
  }
  return {n, std::move(edges)};
}

std::size_t vertex_key(const std::string& key, const std::string& path) {
  if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos) fail(path, "vertex keys are decimal indices");
  return std::stoul(key);
}

GraphModel graph_from(const Json& doc, const std::string& path) {
  auto [n, edges] = graph_core(doc, path);
  const std::string bp = path + ".boundary";
  const Json& b = field(doc, "boundary", path);
  if (!b.is_object()) fail(bp, "expected an object");
  std::map<std::size_t, QVector> vectors;
  std::map<std::size_t, DiagNorm> norms;
  std::set<std::size_t> keys;
  for (auto it = b.begin(); it != b.end(); ++it) {
    const std::string vp = bp + "." + it.key();
    const std::size_t v = vertex_key(it.key(), vp);
    keys.insert(v);
    if (it->is_object())
      norms.emplace(v, norm_from(*it, vp));
    else
      vectors.emplace(v, rational_vector(*it, vp));
  }
  if (!vectors.empty() && !norms.empty()) fail(bp, "boundary values mix vectors and norms");
  for (const auto& [v, x] : vectors)
    if (x.size() != vectors.begin()->second.size()) fail(bp + "." + std::to_string(v), "boundary vectors differ in dimension");
  WeightedGraph g = at(path, [&] { return WeightedGraph(n, edges, keys); });
  return GraphModel{std::move(g), std::move(vectors), std::move(norms)};
}

VoltageGraphModel voltage_from(const Json& doc, const std::string& path, const std::filesystem::path& base_dir) {
  auto [n, edges] = graph_core(doc, path);
  std::vector<Word> labels;
  const Json& ls = array(field(doc, "labels", path), path + ".labels");
  for (std::size_t i = 0; i < ls.size(); ++i) labels.push_back(word(ls[i], path + ".labels[" + std::to_string(i) + "]"));
  const Json& r = field(doc, "rep", path);
  std::optional<std::string> rep_path;
  std::optional<RepModel> rep;
  if (r.is_string()) {
    rep_path = r.get<std::string>();
    const ModelFile inner = at(path + ".rep", [&] { return parse_model_file(base_dir / *rep_path); });
    if (!std::holds_alternative<RepModel>(inner.model)) fail(path + ".rep", "referenced file is not a rep");
    rep = std::get<RepModel>(inner.model);
  } else {
    rep = rep_from(r, path + ".rep");
  }
  VoltageGraph vg = at(path, [&] { return VoltageGraph(WeightedGraph(n, edges), labels); });
  for (std::size_t i = 0; i < labels.size(); ++i)
    at(path + ".labels[" + std::to_string(i) + "]", [&] { rep->rep.presentation().check_word(labels[i]); });
  if (!rep->rep.is_rational()) fail(path + ".rep", "voltage graphs need a rational representation");
  return VoltageGraphModel{std::move(vg), std::move(*rep), std::move(rep_path)};
}

GaussianRational gaussian(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "a complex number is [\"re\", \"im\"]");
  return {rational(j[0], path + "[0]"), rational(j[1], path + "[1]")};
}

ResiduesModel residues_from(const Json& doc, const std::string& path) {
  ResiduesModel m{gaussian(field(doc, "lambda", path), path + ".lambda"), {}};
  const Json& items = array(field(doc, "items", path), path + ".items");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string ip = path + ".items[" + std::to_string(i) + "]";
    m.items.push_back({rational(field(items[i], "weight", ip), ip + ".weight"), gaussian(field(items[i], "residue", ip), ip + ".residue")});
  }
  return m;
}

Json gaussian_json(const GaussianRational& z) { return Json::array({rational_json(z.re), rational_json(z.im)}); }

Json graph_core_json(const WeightedGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back(Json::array({e.tail, e.head, rational_json(e.weight)}));
  return Json{{"vertices", g.vertex_count()}, {"edges", edges}};
}

}  // namespace

std::string ModelFile::kind() const {
  static const char* names[] = {"norm", "graph", "voltage-graph", "rep", "residues"};
  return names[model.index()];
}

ModelFile parse_model(const Json& doc, const std::filesystem::path& base_dir) {
  const std::string root = "$";
  const Json& kind = field(doc, "kind", root);
  if (!kind.is_string()) fail("$.kind", "expected a string");
  const long version = integer(field(doc, "schema_version", root), "$.schema_version");
  if (version != kSchemaVersion) fail("$.schema_version", "unsupported schema version " + std::to_string(version));
  const std::string k = kind.get<std::string>();
  if (k == "norm") {
    no_extra_fields(doc, {"kind", "schema_version", "p", "basis", "weights"}, root);
    return ModelFile{kSchemaVersion, NormModel{norm_from(doc, root)}};
  }
  if (k == "graph") {
    no_extra_fields(doc, {"kind", "schema_version", "vertices", "edges", "boundary"}, root);
    return ModelFile{kSchemaVersion, graph_from(doc, root)};
  }
  if (k == "voltage-graph") {
    no_extra_fields(doc, {"kind", "schema_version", "vertices", "edges", "labels", "rep"}, root);
    return ModelFile{kSchemaVersion, voltage_from(doc, root, base_dir)};
  }
  if (k == "rep") {
    no_extra_fields(doc, {"kind", "schema_version", "generators", "relators", "matrices", "minpoly", "cocycle"}, root);
    return ModelFile{kSchemaVersion, rep_from(doc, root)};
  }
  if (k == "residues") {
    no_extra_fields(doc, {"kind", "schema_version", "lambda", "items"}, root);
    return ModelFile{kSchemaVersion, residues_from(doc, root)};
  }
  fail("$.kind", "unknown kind \"" + k + "\"");
}

ModelFile parse_model_text(const std::string& text, const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    fail("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_model(doc, base_dir);
}

ModelFile parse_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_model_text(ss.str(), path.parent_path());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

Json rational_json(const Rational& x) { return to_string(x); }

Json vector_json(const QVector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(rational_json(x));
  return out;
}

Json matrix_json(const QMatrix& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(rational_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

Json element_json(const NFElem& x) {
  if (x.is_rational()) return rational_json(x.to_rational());
  return vector_json(x.coeffs());
}

Json kmatrix_json(const KMatrix& m) {
  Json out = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(element_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

Json norm_payload(const DiagNorm& n) {
  return Json{{"p", n.place().p()}, {"basis", matrix_json(n.basis())}, {"weights", vector_json(n.weights())}};
}

Json word_json(const Word& w) {
  Json out = Json::array();
  for (int x : w) out.push_back(x);
  return out;
}

Json rep_payload(const GroupRep& rep) {
  Json rels = Json::array(), mats = Json::array();
  for (const auto& r : rep.presentation().relators()) rels.push_back(word_json(r));
  for (const auto& m : rep.matrices()) mats.push_back(kmatrix_json(m));
  Json out{{"generators", rep.presentation().generators()}, {"relators", rels}, {"matrices", mats}};
  if (rep.field()) out["minpoly"] = vector_json(rep.field()->minpoly());
  return out;
}

Json to_json(const ModelFile& m) {
  Json out = std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NormModel>) {
          return norm_payload(x.norm);
        } else if constexpr (std::is_same_v<T, GraphModel>) {
          Json j = graph_core_json(x.graph), b = Json::object();
          for (const auto& [v, val] : x.vector_boundary) b[std::to_string(v)] = vector_json(val);
          for (const auto& [v, val] : x.norm_boundary) b[std::to_string(v)] = norm_payload(val);
          j["boundary"] = b;
          return j;
        } else if constexpr (std::is_same_v<T, VoltageGraphModel>) {
          Json j = graph_core_json(x.graph.graph()), labels = Json::array();
          for (const auto& w : x.graph.labels()) labels.push_back(word_json(w));
          j["labels"] = labels;
          j["rep"] = x.rep_path ? Json(*x.rep_path) : rep_payload(x.rep.rep);
          return j;
        } else if constexpr (std::is_same_v<T, RepModel>) {
          Json j = rep_payload(x.rep);
          if (x.cocycle) {
            Json c = Json::array();
            for (const auto& mm : *x.cocycle) c.push_back(kmatrix_json(mm));
            j["cocycle"] = c;
          }
          return j;
        } else {
          Json items = Json::array();
          for (const auto& it : x.items)
            items.push_back(Json{{"weight", rational_json(it.weight)}, {"residue", gaussian_json(it.residue)}});
          return Json{{"lambda", gaussian_json(x.lambda)}, {"items", items}};
        }
      },
      m.model);
  out["kind"] = m.kind();
  out["schema_version"] = m.schema_version;
  return out;
}

std::string serialize(const ModelFile& m) { return to_json(m).dump(2) + "\n"; }

}  // namespace hk::io
