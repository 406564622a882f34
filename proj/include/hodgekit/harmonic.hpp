#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hodgekit/group.hpp"
#include "hodgekit/norms.hpp"

namespace hk {

struct Edge {
  std::size_t tail = 0;
  std::size_t head = 0;
  Rational weight{1};
};

/// Connected graph with positive rational edge weights and an optional
/// set of boundary vertices. Self-loops are allowed here; Dirichlet
/// problems reject them.
class WeightedGraph {
 public:
  WeightedGraph(std::size_t vertices, std::vector<Edge> edges, std::set<std::size_t> boundary = {});

  std::size_t vertex_count() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::set<std::size_t>& boundary() const { return boundary_; }
  bool is_boundary(std::size_t v) const { return boundary_.count(v) != 0; }
  /// Indices of edges touching v (a loop appears once).
  const std::vector<std::size_t>& incident(std::size_t v) const { return incident_[v]; }
  bool has_loops() const;

 private:
  std::size_t vertices_;
  std::vector<Edge> edges_;
  std::set<std::size_t> boundary_;
  std::vector<std::vector<std::size_t>> incident_;
};

/// Graph whose edges carry words in the generators of a group; an edge
/// s -> t labelled g compares u(t) with rho(g) u(s).
class VoltageGraph {
 public:
  VoltageGraph(WeightedGraph graph, std::vector<Word> labels);

  const WeightedGraph& graph() const { return graph_; }
  const std::vector<Word>& labels() const { return labels_; }

 private:
  WeightedGraph graph_;
  std::vector<Word> labels_;
};

/// A voltage graph together with a rational representation, with the
/// per-edge transport matrices evaluated once.
class EquivariantProblem {
 public:
  EquivariantProblem(VoltageGraph graph, const GroupRep& rep);

  const VoltageGraph& voltage_graph() const { return graph_; }
  const WeightedGraph& graph() const { return graph_.graph(); }
  std::size_t rank() const { return rank_; }
  const QMatrix& transport(std::size_t edge) const { return transport_[edge]; }
  const QMatrix& transport_inverse(std::size_t edge) const { return transport_inv_[edge]; }

 private:
  VoltageGraph graph_;
  std::size_t rank_;
  std::vector<QMatrix> transport_;
  std::vector<QMatrix> transport_inv_;
};

/// Vertex values of a map into an NPC target: QVector (Euclidean space)
/// or DiagNorm (building). `residual` is the d2_sq displacement of the
/// last sweep that produced the state.
template <class Point>
struct MapState {
  std::vector<Point> values;
  Rational residual{0};
};

using EuclideanMap = MapState<QVector>;
using BuildingMap = MapState<DiagNorm>;

Rational point_dist_sq(const QVector& a, const QVector& b);
inline Rational point_dist_sq(const DiagNorm& a, const DiagNorm& b) { return d2_sq(a, b); }

struct RelaxOptions {
  /// Relaxed values are rounded to multiples of 2^-grid_bits (0 = exact).
  /// A rounded value is kept only if it does not raise the local energy,
  /// so the total energy stays monotone.
  unsigned grid_bits = 0;
  CenterOfMassOptions center_of_mass{};
};

template <class Point>
using LocalEnergy = std::function<Rational(const Point&)>;

/// New value for one vertex given its (twisted) neighbours. `separable`
/// means the local energy is sum_i w_i d(x, n_i)^2.
QVector relax_toward(const QVector& old, const std::vector<QVector>& neighbours, const std::vector<Rational>& weights,
                     bool separable, const RelaxOptions& options, const LocalEnergy<QVector>& local_energy);
DiagNorm relax_toward(const DiagNorm& old, const std::vector<DiagNorm>& neighbours,
                      const std::vector<Rational>& weights, bool separable, const RelaxOptions& options,
                      const LocalEnergy<DiagNorm>& local_energy);

enum class Termination { Converged, MaxSweeps };
std::string to_string(Termination t);

template <class Point>
struct SolveReport {
  MapState<Point> state;
  /// Energy of the initial state followed by the energy after each sweep.
  std::vector<Rational> energies;
  /// Sweeps that moved at least one vertex.
  std::size_t sweeps = 0;
  Termination reason = Termination::Converged;
  Rational energy() const { return energies.back(); }
};

struct SolveOptions {
  Rational tol{Rational(1, 1000000000000)};
  std::size_t max_sweeps = 100000;
  RelaxOptions relax{96, {}};
};

// ---------------------------------------------------------------------------
// Dirichlet problems on weighted graphs.

namespace detail {

void check_state_size(std::size_t have, std::size_t want);
void check_dirichlet_graph(const WeightedGraph& g);
void check_tol(const Rational& tol);

template <class Point>
Rational local_energy_at(const WeightedGraph& g, const std::vector<Point>& values, std::size_t v, const Point& x) {
  Rational e = 0;
  for (auto ei : g.incident(v)) {
    const auto& ed = g.edges()[ei];
    const std::size_t other = ed.tail == v ? ed.head : ed.tail;
    e += ed.weight * point_dist_sq(x, values[other]);
  }
  return e;
}

}  // namespace detail

/// sum_e w_e d(u(tail), u(head))^2.
template <class Point>
Rational energy(const WeightedGraph& g, const MapState<Point>& u) {
  detail::check_state_size(u.values.size(), g.vertex_count());
  Rational e = 0;
  for (const auto& ed : g.edges()) e += ed.weight * point_dist_sq(u.values[ed.tail], u.values[ed.head]);
  return e;
}

/// Replaces u(v) by the weighted center of mass of its neighbours.
template <class Point>
MapState<Point> vertex_relax(const WeightedGraph& g, MapState<Point> u, std::size_t v,
                             const RelaxOptions& options = {}) {
  detail::check_state_size(u.values.size(), g.vertex_count());
  detail::check_dirichlet_graph(g);
  if (v >= g.vertex_count()) throw ValidationError("vertex " + std::to_string(v) + " out of range");
  if (g.is_boundary(v)) throw ValidationError("vertex " + std::to_string(v) + " is a boundary vertex");
  std::vector<Point> nbrs;
  std::vector<Rational> ws;
  for (auto ei : g.incident(v)) {
    const auto& ed = g.edges()[ei];
    nbrs.push_back(u.values[ed.tail == v ? ed.head : ed.tail]);
    ws.push_back(ed.weight);
  }
  const auto& values = u.values;
  LocalEnergy<Point> le = [&](const Point& x) { return detail::local_energy_at(g, values, v, x); };
  Point next = relax_toward(u.values[v], nbrs, ws, true, options, le);
  u.residual = point_dist_sq(u.values[v], next);
  u.values[v] = std::move(next);
  return u;
}

/// Gauss-Seidel relaxation over the interior vertices in ascending order
/// until a sweep moves no vertex by d2_sq >= tol^2, or max_sweeps.
/// Interior vertices start at `init` if given, else at the value of the
/// smallest boundary vertex.
template <class Point>
SolveReport<Point> solve_dirichlet(const WeightedGraph& g, const std::map<std::size_t, Point>& boundary_values,
                                   const SolveOptions& options = {}, const MapState<Point>* init = nullptr) {
  detail::check_dirichlet_graph(g);
  detail::check_tol(options.tol);
  if (boundary_values.empty()) throw ValidationError("Dirichlet problem needs a nonempty boundary");
  std::set<std::size_t> keys;
  for (const auto& [v, _] : boundary_values) keys.insert(v);
  if (keys != g.boundary()) throw ValidationError("boundary values must be given exactly on the boundary vertices");

  SolveReport<Point> rep;
  if (init) {
    detail::check_state_size(init->values.size(), g.vertex_count());
    rep.state = *init;
  } else {
    rep.state.values.assign(g.vertex_count(), boundary_values.begin()->second);
  }
  for (const auto& [v, x] : boundary_values) rep.state.values[v] = x;
  rep.state.residual = 0;

  auto& values = rep.state.values;
  rep.energies.push_back(energy(g, rep.state));
  const Rational tol_sq = options.tol * options.tol;
  rep.reason = Termination::MaxSweeps;
  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    Rational worst = 0;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      if (g.is_boundary(v)) continue;
      std::vector<Point> nbrs;
      std::vector<Rational> ws;
      for (auto ei : g.incident(v)) {
        const auto& ed = g.edges()[ei];
        nbrs.push_back(values[ed.tail == v ? ed.head : ed.tail]);
        ws.push_back(ed.weight);
      }
      LocalEnergy<Point> le = [&](const Point& x) { return detail::local_energy_at(g, values, v, x); };
      Point next = relax_toward(values[v], nbrs, ws, true, options.relax, le);
      const Rational moved = point_dist_sq(values[v], next);
      if (moved > worst) worst = moved;
      values[v] = std::move(next);
    }
    rep.state.residual = worst;
    rep.energies.push_back(energy(g, rep.state));
    if (worst > 0) ++rep.sweeps;
    if (worst < tol_sq) {
      rep.reason = Termination::Converged;
      break;
    }
  }
  return rep;
}

/// Per-vertex d2_sq between two maps on the same graph.
template <class Point>
std::vector<Rational> distance_field(const MapState<Point>& a, const MapState<Point>& b) {
  if (a.values.size() != b.values.size()) throw ValidationError("distance_field: maps have different vertex counts");
  std::vector<Rational> out;
  out.reserve(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) out.push_back(point_dist_sq(a.values[i], b.values[i]));
  return out;
}

/// max over interior vertices of d2_sq(u(v), exact center of mass of the neighbours).
template <class Point>
Rational harmonic_defect(const WeightedGraph& g, const MapState<Point>& u) {
  Rational worst = 0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (g.is_boundary(v)) continue;
    auto relaxed = vertex_relax(g, u, v, RelaxOptions{});
    if (relaxed.residual > worst) worst = relaxed.residual;
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Equivariant maps into the building.

/// sum_e w_e d(u(head), rho(g_e) u(tail))^2.
Rational energy(const EquivariantProblem& problem, const BuildingMap& u);

BuildingMap vertex_relax(const EquivariantProblem& problem, BuildingMap u, std::size_t v,
                         const RelaxOptions& options = {});

SolveReport<DiagNorm> solve_equivariant(const EquivariantProblem& problem, const BuildingMap& init,
                                        const SolveOptions& options = {});

/// Log-norm increments of a flat frame along the edges.
struct CharacteristicData {
  /// increments[e][i] = log_q||rho(g_e) F_tail,i||_{u(head)} - log_q||F_tail,i||_{u(tail)}.
  std::vector<std::vector<Rational>> increments;
  /// symmetric[e][k-1] = k-th elementary symmetric function of increments[e].
  std::vector<std::vector<Rational>> symmetric;

  std::vector<Rational> sorted_increments(std::size_t edge) const;
  /// prod_i (T - omega_i), coefficients low -> high.
  std::vector<Rational> polynomial(std::size_t edge) const;
};

/// `frames[v]` has the frame vectors at v as columns; each must be an
/// orthogonal basis for u(v), and rho(g_e) maps the tail frame onto the
/// head frame up to nonzero scalars.
CharacteristicData log_norm_increments(const EquivariantProblem& problem, const BuildingMap& u,
                                       const std::vector<QMatrix>& frames);

std::vector<Rational> elementary_symmetric(const std::vector<Rational>& values);

}  // namespace hk
