#include "hodgekit/harmonic.hpp"

#include <algorithm>
#include <optional>
#include <queue>

namespace hk {

WeightedGraph::WeightedGraph(std::size_t vertices, std::vector<Edge> edges, std::set<std::size_t> boundary)
    : vertices_(vertices), edges_(std::move(edges)), boundary_(std::move(boundary)), incident_(vertices) {
  if (vertices_ == 0) throw ValidationError("graph has no vertices");
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (e.tail >= vertices_ || e.head >= vertices_)
      throw ValidationError("edge " + std::to_string(i) + " has an endpoint out of range");
    if (e.weight <= 0) throw ValidationError("edge " + std::to_string(i) + " has a nonpositive weight");
    incident_[e.tail].push_back(i);
    if (e.head != e.tail) incident_[e.head].push_back(i);
  }
  for (auto b : boundary_)
    if (b >= vertices_) throw ValidationError("boundary vertex " + std::to_string(b) + " out of range");
  std::vector<bool> seen(vertices_, false);
  std::queue<std::size_t> todo;
  todo.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!todo.empty()) {
    const auto v = todo.front();
    todo.pop();
    for (auto ei : incident_[v]) {
      const auto w = edges_[ei].tail == v ? edges_[ei].head : edges_[ei].tail;
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        todo.push(w);
      }
    }
  }
  if (reached != vertices_) throw ValidationError("graph is not connected");
}

bool WeightedGraph::has_loops() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.tail == e.head; });
}

VoltageGraph::VoltageGraph(WeightedGraph graph, std::vector<Word> labels)
    : graph_(std::move(graph)), labels_(std::move(labels)) {
  if (!graph_.boundary().empty()) throw ValidationError("voltage graphs have no boundary");
  if (labels_.size() != graph_.edges().size()) throw ValidationError("expected one label per edge");
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (reduce_word(labels_[i]) != labels_[i])
      throw ValidationError("label of edge " + std::to_string(i) + " is not a reduced word");
}

EquivariantProblem::EquivariantProblem(VoltageGraph graph, const GroupRep& rep)
    : graph_(std::move(graph)), rank_(rep.rank()) {
  if (!rep.is_rational()) throw ValidationError("equivariant maps need a representation over Q");
  for (const auto& w : graph_.labels()) {
    rep.presentation().check_word(w);
    transport_.push_back(rep.evaluate_rational(w));
    transport_inv_.push_back(inverse(transport_.back(), "transport matrix is singular"));
  }
}

Rational point_dist_sq(const QVector& a, const QVector& b) {
  if (a.size() != b.size()) throw ValidationError("points of different dimensions");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Rational d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::string to_string(Termination t) { return t == Termination::Converged ? "converged" : "max_sweeps"; }

namespace {

Rational abs_diff(const Rational& a, const Rational& b) { return abs(a - b); }

// Rounds the exact minimizer m. With a separable local energy each
// coordinate is rounded only if that brings it strictly closer to m;
// otherwise the rounded point replaces old only if it strictly lowers the
// local energy. Either way the local energy cannot rise, and the finite
// grid makes repeated relaxation stall instead of cycling.
template <class Point, class Make>
Point round_step(const Point& old, const std::optional<QVector>& old_coords, const QVector& m, bool separable,
                 unsigned bits, const LocalEnergy<Point>& le, Make make) {
  if (bits == 0) {
    Point exact = make(m);
    if (separable) return exact;
    return le(exact) <= le(old) ? exact : old;
  }
  if (separable && old_coords) {
    QVector chosen(m.size());
    bool changed = false;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const Rational s = snap_to_grid(m[i], bits);
      if (abs_diff(s, m[i]) < abs_diff((*old_coords)[i], m[i])) {
        chosen[i] = s;
        changed = changed || s != (*old_coords)[i];
      } else {
        chosen[i] = (*old_coords)[i];
      }
    }
    return changed ? make(chosen) : old;
  }
  QVector snapped(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) snapped[i] = snap_to_grid(m[i], bits);
  Point cand = make(snapped);
  return le(cand) < le(old) ? cand : old;
}

QVector weighted_mean(const std::vector<QVector>& pts, const std::vector<Rational>& ws) {
  QVector m(pts.front().size());
  Rational total = 0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += ws[k] * pts[k][i];
    total += ws[k];
  }
  for (auto& x : m) x /= total;
  return m;
}

}  // namespace

QVector relax_toward(const QVector& old, const std::vector<QVector>& neighbours, const std::vector<Rational>& weights,
                     bool separable, const RelaxOptions& options, const LocalEnergy<QVector>& local_energy) {
  if (neighbours.empty()) return old;
  const QVector m = weighted_mean(neighbours, weights);
  return round_step<QVector>(old, old, m, separable, options.grid_bits, local_energy,
                             [](const QVector& x) { return x; });
}

DiagNorm relax_toward(const DiagNorm& old, const std::vector<DiagNorm>& neighbours,
                      const std::vector<Rational>& weights, bool separable, const RelaxOptions& options,
                      const LocalEnergy<DiagNorm>& local_energy) {
  if (neighbours.empty()) return old;
  std::vector<QVector> coords;
  auto in_apartment = [&](const QMatrix& basis) {
    coords.clear();
    for (const auto& nb : neighbours) {
      auto w = weights_in_basis(nb, basis);
      if (!w) return false;
      coords.push_back(std::move(*w));
    }
    return true;
  };
  std::optional<QMatrix> apartment;
  if (in_apartment(old.basis())) {
    apartment = old.basis();
  } else {
    auto com = center_of_mass(neighbours, weights, options.center_of_mass);
    if (com.exact && in_apartment(com.point.basis())) {
      apartment = com.point.basis();
    } else {
      // Iterative estimate, already on the center-of-mass grid.
      return local_energy(com.point) < local_energy(old) ? com.point : old;
    }
  }
  const QVector m = weighted_mean(coords, weights);
  const auto old_coords = weights_in_basis(old, *apartment);
  const auto& place = old.place();
  const QMatrix& basis = *apartment;
  return round_step<DiagNorm>(old, old_coords, m, separable, options.grid_bits, local_energy,
                              [&](const QVector& w) { return DiagNorm(place, basis, w); });
}

namespace detail {

void check_state_size(std::size_t have, std::size_t want) {
  if (have != want)
    throw ValidationError("map has " + std::to_string(have) + " values but the graph has " + std::to_string(want) +
                          " vertices");
}

void check_dirichlet_graph(const WeightedGraph& g) {
  for (const auto& e : g.edges())
    if (e.tail == e.head)
      throw ValidationError("self-loop at vertex " + std::to_string(e.tail) + " is not allowed in Dirichlet mode");
}

void check_tol(const Rational& tol) {
  if (tol <= 0) throw ValidationError("tol must be positive");
}

}  // namespace detail

// ---------------------------------------------------------------------------

namespace {

void check_equivariant_state(const EquivariantProblem& p, const BuildingMap& u) {
  detail::check_state_size(u.values.size(), p.graph().vertex_count());
  for (std::size_t v = 0; v < u.values.size(); ++v) {
    if (u.values[v].dim() != p.rank())
      throw ValidationError("value at vertex " + std::to_string(v) + " has the wrong dimension");
    if (!(u.values[v].place() == u.values.front().place()))
      throw ValidationError("values at different primes");
  }
}

Rational edge_term(const EquivariantProblem& p, std::size_t ei, const DiagNorm& tail, const DiagNorm& head) {
  return p.graph().edges()[ei].weight * d2_sq(head, act(p.transport(ei), tail));
}

Rational local_energy(const EquivariantProblem& p, const std::vector<DiagNorm>& values, std::size_t v,
                      const DiagNorm& x) {
  Rational e = 0;
  for (auto ei : p.graph().incident(v)) {
    const auto& ed = p.graph().edges()[ei];
    const DiagNorm& tail = ed.tail == v ? x : values[ed.tail];
    const DiagNorm& head = ed.head == v ? x : values[ed.head];
    e += edge_term(p, ei, tail, head);
  }
  return e;
}

DiagNorm relax_vertex(const EquivariantProblem& p, const std::vector<DiagNorm>& values, std::size_t v,
                      const RelaxOptions& options) {
  std::vector<DiagNorm> nbrs;
  std::vector<Rational> ws;
  bool separable = true;
  for (auto ei : p.graph().incident(v)) {
    const auto& ed = p.graph().edges()[ei];
    if (ed.tail == v && ed.head == v) {
      // A loop pulls toward both translates of the current value; its
      // energy is not of barycentric form, so candidates are compared.
      separable = false;
      nbrs.push_back(act(p.transport(ei), values[v]));
      nbrs.push_back(act(p.transport_inverse(ei), values[v]));
      ws.push_back(ed.weight);
      ws.push_back(ed.weight);
    } else if (ed.head == v) {
      nbrs.push_back(act(p.transport(ei), values[ed.tail]));
      ws.push_back(ed.weight);
    } else {
      nbrs.push_back(act(p.transport_inverse(ei), values[ed.head]));
      ws.push_back(ed.weight);
    }
  }
  LocalEnergy<DiagNorm> le = [&](const DiagNorm& x) { return local_energy(p, values, v, x); };
  return relax_toward(values[v], nbrs, ws, separable, options, le);
}

}  // namespace

Rational energy(const EquivariantProblem& problem, const BuildingMap& u) {
  check_equivariant_state(problem, u);
  Rational e = 0;
  const auto& edges = problem.graph().edges();
  for (std::size_t i = 0; i < edges.size(); ++i)
    e += edge_term(problem, i, u.values[edges[i].tail], u.values[edges[i].head]);
  return e;
}

BuildingMap vertex_relax(const EquivariantProblem& problem, BuildingMap u, std::size_t v,
                         const RelaxOptions& options) {
  check_equivariant_state(problem, u);
  if (v >= u.values.size()) throw ValidationError("vertex " + std::to_string(v) + " out of range");
  DiagNorm next = relax_vertex(problem, u.values, v, options);
  u.residual = d2_sq(u.values[v], next);
  u.values[v] = std::move(next);
  return u;
}

SolveReport<DiagNorm> solve_equivariant(const EquivariantProblem& problem, const BuildingMap& init,
                                        const SolveOptions& options) {
  detail::check_tol(options.tol);
  check_equivariant_state(problem, init);
  SolveReport<DiagNorm> rep;
  rep.state = init;
  rep.state.residual = 0;
  rep.energies.push_back(energy(problem, rep.state));
  const Rational tol_sq = options.tol * options.tol;
  rep.reason = Termination::MaxSweeps;
  auto& values = rep.state.values;
  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    Rational worst = 0;
    for (std::size_t v = 0; v < values.size(); ++v) {
      DiagNorm next = relax_vertex(problem, values, v, options.relax);
      const Rational moved = d2_sq(values[v], next);
      if (moved > worst) worst = moved;
      values[v] = std::move(next);
    }
    rep.state.residual = worst;
    rep.energies.push_back(energy(problem, rep.state));
    if (worst > 0) ++rep.sweeps;
    if (worst < tol_sq) {
      rep.reason = Termination::Converged;
      break;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<Rational> elementary_symmetric(const std::vector<Rational>& values) {
  // e[k] of the prefix, updated one value at a time.
  std::vector<Rational> e(values.size() + 1);
  e[0] = 1;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t k = i + 1; k >= 1; --k) e[k] += e[k - 1] * values[i];
  return {e.begin() + 1, e.end()};
}

std::vector<Rational> CharacteristicData::sorted_increments(std::size_t edge) const {
  auto v = increments.at(edge);
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<Rational> CharacteristicData::polynomial(std::size_t edge) const {
  const auto& e = symmetric.at(edge);
  const std::size_t r = e.size();
  std::vector<Rational> coeffs(r + 1);
  coeffs[r] = 1;
  for (std::size_t k = 1; k <= r; ++k) coeffs[r - k] = (k % 2 ? Rational(-1) : Rational(1)) * e[k - 1];
  return coeffs;
}

namespace {

// Columns of a are nonzero multiples of the corresponding columns of b.
bool columnwise_proportional(const QMatrix& a, const QMatrix& b) {
  for (std::size_t j = 0; j < a.cols(); ++j) {
    Rational ratio;
    bool have = false;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      const bool za = sgn(a(i, j)) == 0, zb = sgn(b(i, j)) == 0;
      if (za != zb) return false;
      if (za) continue;
      const Rational r = a(i, j) / b(i, j);
      if (have && r != ratio) return false;
      ratio = r;
      have = true;
    }
    if (!have) return false;
  }
  return true;
}

}  // namespace

CharacteristicData log_norm_increments(const EquivariantProblem& problem, const BuildingMap& u,
                                       const std::vector<QMatrix>& frames) {
  check_equivariant_state(problem, u);
  const std::size_t n = problem.graph().vertex_count(), r = problem.rank();
  if (frames.size() != n) throw ValidationError("expected one frame per vertex");
  for (std::size_t v = 0; v < n; ++v) {
    if (frames[v].rows() != r || frames[v].cols() != r)
      throw ValidationError("frame at vertex " + std::to_string(v) + " has the wrong shape");
    if (rank(frames[v]) != r) throw ValidationError("frame at vertex " + std::to_string(v) + " is not a basis");
    if (!is_orthogonal(u.values[v], frames[v]))
      throw ValidationError("frame not orthogonal at vertex " + std::to_string(v));
  }
  CharacteristicData out;
  const auto& edges = problem.graph().edges();
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    const auto& ed = edges[ei];
    const QMatrix moved = problem.transport(ei) * frames[ed.tail];
    if (!columnwise_proportional(moved, frames[ed.head]))
      throw ValidationError("frame not flat along edge " + std::to_string(ei));
    std::vector<Rational> inc;
    for (std::size_t i = 0; i < r; ++i) {
      const LogValue at_head = norm_eval(u.values[ed.head], moved.col(i));
      const LogValue at_tail = norm_eval(u.values[ed.tail], frames[ed.tail].col(i));
      inc.push_back(at_head.value() - at_tail.value());
    }
    out.symmetric.push_back(elementary_symmetric(inc));
    out.increments.push_back(std::move(inc));
  }
  return out;
}

}  // namespace hk
