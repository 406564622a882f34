#include <doctest.h>

#include "hodgekit/harmonic.hpp"
#include "hodgekit/polynomial.hpp"
#include "test_support.hpp"

using namespace hk;
using hk::testing::Rng;

namespace {

const PrimePlace P2(2);

DiagNorm std_norm(std::initializer_list<long> ws) { return DiagNorm::standard(P2, QVector(ws.begin(), ws.end())); }

GroupRep rank1(std::vector<long> images) {
  std::vector<QMatrix> ms;
  for (long x : images) ms.push_back(QMatrix{{Rational(x)}});
  return GroupRep::from_rational(GroupPresentation::free(images.size()), ms);
}

GroupRep diagonal(const std::vector<std::pair<long, long>>& images) {
  std::vector<QMatrix> ms;
  for (auto [a, b] : images) ms.push_back(QMatrix{{Rational(a), 0}, {0, Rational(b)}});
  return GroupRep::from_rational(GroupPresentation::free(images.size()), ms);
}

// One vertex with a loop labelled g_i for every generator.
VoltageGraph bouquet(std::size_t loops) {
  std::vector<Edge> es;
  std::vector<Word> labels;
  for (std::size_t i = 0; i < loops; ++i) {
    es.push_back({0, 0, 1});
    labels.push_back({static_cast<int>(i + 1)});
  }
  return VoltageGraph(WeightedGraph(1, es), labels);
}

BuildingMap constant_map(std::size_t n, const DiagNorm& x) { return BuildingMap{std::vector<DiagNorm>(n, x), 0}; }

SolveOptions stalling_options() {
  SolveOptions o;
  o.tol = Rational(1, 1);
  for (int i = 0; i < 200; ++i) o.tol /= 2;
  o.max_sweeps = 200000;
  return o;
}

// sqrt(a) <= sqrt(b) + c, decided exactly (c >= 0).
bool sqrt_le(const Rational& a, const Rational& b, const Rational& c) {
  const Rational gap = a - b - c * c;
  if (sgn(gap) <= 0) return true;
  return gap * gap <= 4 * c * c * b;
}

}  // namespace

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(WeightedGraph(0, {}), ValidationError);
  CHECK_THROWS_AS(WeightedGraph(3, {{0, 1, 1}}), ValidationError);
  CHECK_THROWS_AS(WeightedGraph(2, {{0, 1, 0}}), ValidationError);
  CHECK_THROWS_AS(WeightedGraph(2, {{0, 2, 1}}), ValidationError);
  CHECK_THROWS_AS(VoltageGraph(WeightedGraph(1, {{0, 0, 1}}), {{1, -1}}), ValidationError);
  CHECK_NOTHROW(WeightedGraph(1, {}));
}

TEST_CASE("energy examples") {
  const WeightedGraph path(3, {{0, 1, 1}, {1, 2, 1}});
  EuclideanMap u{{{Rational(0)}, {Rational(1, 2)}, {Rational(1)}}, 0};
  CHECK(energy(path, u) == Rational(1, 2));
  CHECK(energy(path, MapState<DiagNorm>{std::vector<DiagNorm>(3, std_norm({1, 2})), 0}) == 0);

  const EquivariantProblem loop(bouquet(1), rank1({2}));
  for (long a : {-3, 0, 5}) CHECK(energy(loop, constant_map(1, std_norm({a}))) == 1);
  CHECK(energy(loop, constant_map(1, DiagNorm::standard(P2, {Rational(7, 3)}))) == 1);

  const EquivariantProblem trivial(VoltageGraph(WeightedGraph(2, {{0, 1, 1}, {1, 0, 3}}), {{1}, {}}), rank1({1}));
  CHECK(energy(trivial, constant_map(2, std_norm({4}))) == 0);
  CHECK_THROWS_AS(energy(path, EuclideanMap{{{Rational(0)}}, 0}), ValidationError);
}

TEST_CASE("vertex relaxation") {
  const WeightedGraph star(4, {{0, 1, 1}, {0, 2, 2}, {0, 3, 3}}, {1, 2, 3});
  SUBCASE("equal neighbours") {
    const DiagNorm p = DiagNorm(P2, QMatrix{{1, 1}, {0, 2}}, {Rational(1, 3), Rational(-2)});
    BuildingMap u{{std_norm({0, 0}), p, p, p}, 0};
    auto r = vertex_relax(star, u, 0);
    CHECK(norms_equal(r.values[0], p));
    for (std::size_t v = 1; v < 4; ++v) CHECK(norms_equal(r.values[v], p));
  }
  SUBCASE("weighted mean") {
    EuclideanMap u{{{Rational(9)}, {Rational(1)}, {Rational(2)}, {Rational(-1)}}, 0};
    auto r = vertex_relax(star, u, 0);
    CHECK(r.values[0][0] == Rational(1, 3));
    CHECK(energy(star, r) <= energy(star, u));
    CHECK_THROWS_AS(vertex_relax(star, u, 1), ValidationError);
  }
  SUBCASE("two neighbours give the midpoint") {
    Rng rng(11);
    const WeightedGraph path(3, {{0, 1, 1}, {1, 2, 1}}, {0, 2});
    for (int trial = 0; trial < 30; ++trial) {
      const DiagNorm a = rng.norm(2, 3), b = rng.norm(2, 3), c = rng.norm(2, 3);
      BuildingMap u{{a, c, b}, 0};
      auto r = vertex_relax(path, u, 1);
      CHECK(norms_equal(r.values[1], midpoint(a, b)));
      CHECK(energy(path, r) <= energy(path, u));
    }
  }
}

TEST_CASE("Dirichlet examples") {
  SUBCASE("constant boundary") {
    const WeightedGraph g(4, {{0, 1, 1}, {1, 2, 2}, {2, 3, 1}, {3, 0, 1}}, {0, 2});
    const DiagNorm p(P2, QMatrix{{1, 0}, {1, 1}}, {Rational(1, 2), Rational(3)});
    auto rep = solve_dirichlet<DiagNorm>(g, {{0, p}, {2, p}});
    CHECK(rep.sweeps == 0);
    CHECK(rep.reason == Termination::Converged);
    CHECK(rep.energy() == 0);
    for (const auto& x : rep.state.values) CHECK(norms_equal(x, p));
  }
  SUBCASE("path") {
    const WeightedGraph g(3, {{0, 1, 1}, {1, 2, 1}}, {0, 2});
    auto rep = solve_dirichlet<QVector>(g, {{0, {Rational(0)}}, {2, {Rational(1)}}});
    CHECK(rep.state.values[1][0] == Rational(1, 2));
    CHECK(rep.energy() == Rational(1, 2));
  }
  SUBCASE("four-cycle in an apartment") {
    const WeightedGraph g(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}}, {0, 2});
    auto rep = solve_dirichlet<DiagNorm>(g, {{0, std_norm({0, 0})}, {2, std_norm({2, 4})}});
    CHECK(rep.reason == Termination::Converged);
    CHECK(norms_equal(rep.state.values[1], std_norm({1, 2})));
    CHECK(norms_equal(rep.state.values[3], std_norm({1, 2})));
  }
  SUBCASE("errors") {
    const WeightedGraph g(3, {{0, 1, 1}, {1, 2, 1}}, {0, 2});
    const WeightedGraph none(3, {{0, 1, 1}, {1, 2, 1}});
    CHECK_THROWS_AS(solve_dirichlet<QVector>(none, {}), ValidationError);
    SolveOptions bad;
    bad.tol = 0;
    CHECK_THROWS_AS(solve_dirichlet<QVector>(g, {{0, {Rational(0)}}, {2, {Rational(1)}}}, bad), ValidationError);
    CHECK_THROWS_AS(solve_dirichlet<QVector>(g, {{0, {Rational(0)}}}), ValidationError);
    const WeightedGraph loop(2, {{0, 1, 1}, {1, 1, 1}}, {0});
    CHECK_THROWS_AS(solve_dirichlet<QVector>(loop, {{0, {Rational(0)}}}), ValidationError);
  }
}

TEST_CASE("Dirichlet agrees with the Laplacian oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform(3, 12));
    auto edges = testing::random_connected_edges(rng, n, static_cast<std::size_t>(rng.uniform(0, 6)));
    std::set<std::size_t> bnd{0, n - 1};
    std::map<std::size_t, QVector> values;
    std::map<std::size_t, Rational> xs, ys;
    for (auto b : bnd) {
      xs[b] = rng.rational(20, 5);
      ys[b] = rng.rational(20, 5);
      values[b] = {xs[b], ys[b]};
    }
    const WeightedGraph g(n, edges, bnd);
    SolveOptions opts;
    opts.tol = Rational(1, 1000000);
    opts.tol *= opts.tol * opts.tol * opts.tol;  // 1e-24
    auto rep = solve_dirichlet(g, values, opts);
    REQUIRE(rep.reason == Termination::Converged);
    for (std::size_t i = 1; i < rep.energies.size(); ++i) CHECK(rep.energies[i] <= rep.energies[i - 1]);
    const auto ox = testing::laplacian_oracle(n, edges, xs), oy = testing::laplacian_oracle(n, edges, ys);
    const Rational slack(1, 1000000000);
    for (std::size_t v = 0; v < n; ++v) {
      CHECK(abs(rep.state.values[v][0] - ox[v]) <= slack * (abs(ox[v]) + 1));
      CHECK(abs(rep.state.values[v][1] - oy[v]) <= slack * (abs(oy[v]) + 1));
    }
    CHECK(harmonic_defect(g, rep.state) < Rational(1, 1000000000));
  }
}

TEST_CASE("distance fields") {
  Rng rng(5);
  const std::size_t n = 7;
  auto edges = testing::random_connected_edges(rng, n, 4);
  const WeightedGraph g(n, edges, {0, 3, 6});
  std::map<std::size_t, QVector> a, b;
  const Rational c(3, 4);
  for (auto v : g.boundary()) {
    a[v] = {rng.rational(10, 3)};
    b[v] = {a[v][0] + c};
  }
  auto ua = solve_dirichlet(g, a), ub = solve_dirichlet(g, b);
  for (const auto& d : distance_field(ua.state, ua.state)) CHECK(d == 0);
  for (const auto& d : distance_field(ua.state, ub.state)) CHECK(d == c * c);
  CHECK_THROWS_AS(distance_field(ua.state, EuclideanMap{}), ValidationError);

  SUBCASE("maximum principle in an apartment") {
    const QMatrix frame = rng.invertible(2);
    const SolveOptions opts;
    for (int trial = 0; trial < 5; ++trial) {
      std::map<std::size_t, DiagNorm> pa, pb;
      for (auto v : g.boundary()) {
        pa.emplace(v, DiagNorm(P2, frame, {rng.rational(8, 4), rng.rational(8, 4)}));
        pb.emplace(v, DiagNorm(P2, frame, {rng.rational(8, 4), rng.rational(8, 4)}));
      }
      auto sa = solve_dirichlet(g, pa, opts), sb = solve_dirichlet(g, pb, opts);
      const auto field = distance_field(sa.state, sb.state);
      Rational inner = 0, outer = 0;
      for (std::size_t v = 0; v < n; ++v) {
        auto& slot = g.is_boundary(v) ? outer : inner;
        if (field[v] > slot) slot = field[v];
      }
      CHECK(sqrt_le(inner, outer, 10 * opts.tol));
    }
  }
}

TEST_CASE("equivariant examples") {
  SUBCASE("trivial representation") {
    const WeightedGraph g(3, {{0, 1, 1}, {1, 2, 2}, {2, 0, 1}});
    const EquivariantProblem prob(VoltageGraph(g, {{1}, {}, {-1}}), rank1({1}));
    BuildingMap init{{std_norm({0}), std_norm({3}), std_norm({-5})}, 0};
    auto rep = solve_equivariant(prob, init);
    CHECK(rep.reason == Termination::Converged);
    CHECK(rep.energy() < Rational(1, 1000000));
    CHECK(d2_sq(rep.state.values[0], rep.state.values[2]) < Rational(1, 1000000));
  }
  SUBCASE("one loop") {
    const EquivariantProblem prob(bouquet(1), rank1({2}));
    auto rep = solve_equivariant(prob, constant_map(1, std_norm({5})));
    CHECK(rep.energy() == 1);
  }
  SUBCASE("two-loop bouquet") {
    const EquivariantProblem prob(bouquet(2), rank1({2, 8}));
    auto rep = solve_equivariant(prob, constant_map(1, DiagNorm::standard(P2, {Rational(1, 3)})));
    CHECK(rep.energy() == 10);
  }
  SUBCASE("singular transport") {
    CHECK_THROWS_AS(rank1({0}), ValidationError);
  }
  SUBCASE("direct sums add energies") {
    Rng rng(77);
    for (int trial = 0; trial < 4; ++trial) {
      const std::size_t n = static_cast<std::size_t>(rng.uniform(2, 5));
      auto edges = testing::random_connected_edges(rng, n, 3, 2);
      std::vector<Word> labels;
      for (std::size_t e = 0; e < edges.size(); ++e) labels.push_back(rng.coin() ? Word{1} : Word{-2});
      const VoltageGraph vg(WeightedGraph(n, edges), labels);
      auto pick = [&] { return (rng.coin() ? 1 : -1) * (1L << rng.uniform(0, 3)) * (rng.coin() ? 3 : 1); };
      const long a1 = pick(), a2 = pick(), b1 = pick(), b2 = pick();
      const EquivariantProblem pa(vg, rank1({a1, a2})), pb(vg, rank1({b1, b2}));
      const EquivariantProblem ps(vg, diagonal({{a1, b1}, {a2, b2}}));
      BuildingMap ia, ib, is;
      for (std::size_t v = 0; v < n; ++v) {
        const Rational x = rng.rational(6, 3), y = rng.rational(6, 3);
        ia.values.push_back(DiagNorm::standard(P2, {x}));
        ib.values.push_back(DiagNorm::standard(P2, {y}));
        is.values.push_back(DiagNorm::standard(P2, {x, y}));
      }
      const auto opts = stalling_options();
      auto ra = solve_equivariant(pa, ia, opts), rb = solve_equivariant(pb, ib, opts);
      auto rs = solve_equivariant(ps, is, opts);
      REQUIRE(rs.reason == Termination::Converged);
      CHECK(rs.energy() == ra.energy() + rb.energy());
      for (std::size_t i = 1; i < rs.energies.size(); ++i) CHECK(rs.energies[i] <= rs.energies[i - 1]);
    }
  }
}

TEST_CASE("characteristic data") {
  SUBCASE("constant map, trivial voltages") {
    const WeightedGraph g(2, {{0, 1, 1}, {1, 0, 2}});
    const EquivariantProblem prob(VoltageGraph(g, {{}, {}}), rank1({3}));
    const DiagNorm x = std_norm({2});
    auto data = log_norm_increments(prob, constant_map(2, x), {QMatrix{{1}}, QMatrix{{5}}});
    for (const auto& inc : data.increments) CHECK(inc == std::vector<Rational>{0});
  }
  SUBCASE("rank one loop") {
    const EquivariantProblem prob(bouquet(1), rank1({2}));
    auto rep = solve_equivariant(prob, constant_map(1, std_norm({0})));
    auto data = log_norm_increments(prob, rep.state, {QMatrix{{1}}});
    CHECK(abs(data.increments[0][0]) == 1);
    CHECK(data.polynomial(0) == std::vector<Rational>{-data.increments[0][0], 1});
  }
  SUBCASE("direct sum multiplies polynomials") {
    const WeightedGraph g(2, {{0, 1, 1}, {1, 0, 1}, {0, 0, 1}});
    const VoltageGraph vg(g, {{1}, {}, {2}});
    const EquivariantProblem pa(vg, rank1({2, 3})), pb(vg, rank1({4, 1})), ps(vg, diagonal({{2, 4}, {3, 1}}));
    const auto opts = stalling_options();
    auto ra = solve_equivariant(pa, constant_map(2, std_norm({0})), opts);
    auto rb = solve_equivariant(pb, constant_map(2, std_norm({0})), opts);
    auto rs = solve_equivariant(ps, constant_map(2, std_norm({0, 0})), opts);
    const QMatrix one{{1}}, id2 = QMatrix::identity(2);
    auto da = log_norm_increments(pa, ra.state, {one, one});
    auto db = log_norm_increments(pb, rb.state, {one, one});
    auto ds = log_norm_increments(ps, rs.state, {id2, id2});
    for (std::size_t e = 0; e < 3; ++e) {
      auto u = da.increments[e];
      u.insert(u.end(), db.increments[e].begin(), db.increments[e].end());
      std::sort(u.begin(), u.end());
      CHECK(ds.sorted_increments(e) == u);
      CHECK(ds.polynomial(e) == poly_mul(da.polynomial(e), db.polynomial(e)));
    }
  }
  SUBCASE("frame errors") {
    const DiagNorm x = std_norm({0, 0});
    const EquivariantProblem p2(VoltageGraph(WeightedGraph(2, {{0, 1, 1}}), {{1}}), diagonal({{2, 3}}));
    // (1,1),(1,-1) is not orthogonal for the standard norm at p = 2.
    const QMatrix bad{{1, 1}, {1, -1}};
    CHECK_THROWS_WITH_AS(log_norm_increments(p2, constant_map(2, x), {QMatrix::identity(2), bad}),
                         "frame not orthogonal at vertex 1", ValidationError);
    const QMatrix scaled{{3, 0}, {0, Rational(1, 2)}};
    const QMatrix upper{{1, 1}, {0, 1}};
    CHECK_THROWS_WITH_AS(log_norm_increments(p2, constant_map(2, x), {QMatrix::identity(2), upper}),
                         "frame not flat along edge 0", ValidationError);
    CHECK_NOTHROW(log_norm_increments(p2, constant_map(2, x), {QMatrix::identity(2), scaled}));
  }
  SUBCASE("subdivision refines increments") {
    const WeightedGraph g(2, {{0, 1, 1}, {1, 0, 2}});
    const EquivariantProblem prob(VoltageGraph(g, {{1}, {2}}), diagonal({{2, 9}, {3, 4}}));
    auto rep = solve_equivariant(prob, constant_map(2, std_norm({0, 0})), stalling_options());
    const QMatrix id2 = QMatrix::identity(2);
    auto base = log_norm_increments(prob, rep.state, {id2, id2});
    // Split edge 0 (0 -> 1, label g1) through a new vertex 2 at the midpoint.
    const WeightedGraph fine(3, {{0, 2, 2}, {1, 0, 2}, {2, 1, 2}});
    const EquivariantProblem sub(VoltageGraph(fine, {{1}, {2}, {}}), diagonal({{2, 9}, {3, 4}}));
    BuildingMap u = rep.state;
    u.values.push_back(midpoint(act(prob.transport(0), u.values[0]), u.values[1]));
    auto refined = log_norm_increments(sub, u, {id2, id2, id2});
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(refined.increments[0][i] + refined.increments[2][i] == base.increments[0][i]);
      CHECK(refined.increments[0][i] == refined.increments[2][i]);
    }
    CHECK(refined.increments[1] == base.increments[1]);
  }
}
