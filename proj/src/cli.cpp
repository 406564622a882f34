#include "hodgekit/cli.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "hodgekit/deformation.hpp"
#include "hodgekit/local_systems.hpp"
#include "hodgekit/model_io.hpp"

namespace hk::cli {

namespace {

using io::Json;

struct Args {
  std::vector<std::string> files;
  std::vector<std::string> words;
  std::vector<std::string> masses;
  std::optional<double> tol;
  std::optional<std::size_t> max_sweeps;
  std::optional<long> place;
  std::size_t order = 2;
  bool inverse = false;
};

template <class T>
const T& expect(const io::ModelFile& m, const std::string& file) {
  if (!std::holds_alternative<T>(m.model)) throw ValidationError(file + ": unexpected model kind \"" + m.kind() + "\"");
  return std::get<T>(m.model);
}

io::ModelFile load(const std::string& file) { return io::parse_model_file(file); }

Word parse_word(std::string text) {
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  Word w;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    int x = 0;
    try {
      x = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || x == 0) throw ValidationError("invalid word letter \"" + tok + "\"");
    w.push_back(x);
  }
  return w;
}

Word single_word(const Args& a, const GroupRep& rep, const char* fallback) {
  if (a.words.size() > 1) throw ValidationError("expected a single --word");
  const Word w = parse_word(a.words.empty() ? fallback : a.words.front());
  rep.presentation().check_word(w);
  return w;
}

Rational tol_of(const Args& a, const Rational& fallback) {
  if (!a.tol) return fallback;
  if (!(*a.tol > 0)) throw ValidationError("--tol must be positive");
  return Rational(*a.tol);
}

void check_place(const Args& a, const DiagNorm& n, const std::string& file) {
  if (a.place && *a.place != n.place().p())
    throw ValidationError(file + ": norm lives over p = " + std::to_string(n.place().p()) + ", not --place " +
                          std::to_string(*a.place));
}

DiagNorm load_norm(const Args& a, const std::string& file) {
  const DiagNorm n = expect<io::NormModel>(load(file), file).norm;
  check_place(a, n, file);
  return n;
}

void need_files(const Args& a, std::size_t n) {
  if (a.files.size() != n) throw ValidationError("expected " + std::to_string(n) + " input file(s)");
}

Json norm_dist(const Args& a) {
  need_files(a, 2);
  const auto d = distances(load_norm(a, a.files[0]), load_norm(a, a.files[1]));
  return Json{{"d2_sq", io::rational_json(d.d2_sq)}, {"d_inf", io::rational_json(d.d_inf)}};
}

Json norm_spectrum(const Args& a) {
  need_files(a, 2);
  const DiagNorm x = load_norm(a, a.files[0]), y = load_norm(a, a.files[1]);
  const auto cb = common_orthogonal_basis(x, y);
  return Json{{"lambdas", io::vector_json(relative_spectrum(x, y).lambdas)},
              {"basis", io::matrix_json(cb.basis)},
              {"weights_a", io::vector_json(cb.weights_a)},
              {"weights_b", io::vector_json(cb.weights_b)}};
}

Json norm_com(const Args& a) {
  if (a.files.empty()) throw ValidationError("expected at least one norm file");
  std::vector<DiagNorm> pts;
  for (const auto& f : a.files) pts.push_back(load_norm(a, f));
  std::vector<Rational> masses(pts.size(), Rational(1));
  if (!a.masses.empty()) {
    if (a.masses.size() != pts.size()) throw ValidationError("one --mass per norm file required");
    for (std::size_t i = 0; i < masses.size(); ++i) masses[i] = parse_rational(a.masses[i]);
  }
  CenterOfMassOptions opt;
  opt.tol = tol_of(a, opt.tol);
  if (a.max_sweeps) opt.max_sweeps = *a.max_sweeps;
  const auto c = center_of_mass(pts, masses, opt);
  return Json{{"point", io::norm_payload(c.point)},
              {"objective", io::rational_json(c.objective)},
              {"objective_approx", c.objective.get_d()},
              {"exact", c.exact},
              {"sweeps", c.sweeps},
              {"converged", c.converged}};
}

SolveOptions solve_options(const Args& a) {
  SolveOptions opt;
  opt.tol = tol_of(a, opt.tol);
  if (a.max_sweeps) opt.max_sweeps = *a.max_sweeps;
  return opt;
}

template <class Point, class F>
Json report_json(const SolveReport<Point>& r, F value_json) {
  Json values = Json::array();
  for (const auto& v : r.state.values) values.push_back(value_json(v));
  return Json{{"values", values},
              {"energy", io::rational_json(r.energy())},
              {"energy_approx", r.energy().get_d()},
              {"sweeps", r.sweeps},
              {"termination", to_string(r.reason)}};
}

Json harmonic_solve(const Args& a) {
  need_files(a, 1);
  const auto m = load(a.files[0]);
  const SolveOptions opt = solve_options(a);
  if (const auto* g = std::get_if<io::GraphModel>(&m.model)) {
    if (g->building_target()) {
      for (const auto& [v, n] : g->norm_boundary) check_place(a, n, a.files[0]);
      return report_json(solve_dirichlet(g->graph, g->norm_boundary, opt), io::norm_payload);
    }
    return report_json(solve_dirichlet(g->graph, g->vector_boundary, opt), io::vector_json);
  }
  const auto& vg = expect<io::VoltageGraphModel>(m, a.files[0]);
  if (!a.place) throw ValidationError("harmonic solve on a voltage graph needs --place");
  const EquivariantProblem problem(vg.graph, vg.rep.rep);
  BuildingMap init;
  init.values.assign(vg.graph.graph().vertex_count(),
                     DiagNorm::standard(PrimePlace(*a.place), std::vector<Rational>(vg.rep.rep.rank())));
  return report_json(solve_equivariant(problem, init, opt), io::norm_payload);
}

io::RepModel load_rep(const Args& a) {
  need_files(a, 1);
  return expect<io::RepModel>(load(a.files[0]), a.files[0]);
}

Json gr_dims(const WeightFiltration& w) {
  Json out = Json::object();
  for (int k = w.lowest; k <= w.highest; ++k)
    if (w.graded_dim(k) != 0) out[std::to_string(k)] = w.graded_dim(k);
  return out;
}

Json rep_weightfilt(const Args& a) {
  const auto model = load_rep(a);
  const GroupRep& rep = model.rep;
  const Word w = single_word(a, rep, "1");
  const KMatrix n = rep.evaluate(w) - KMatrix::identity(rep.rank());
  return Json{{"gr_dims", gr_dims(weight_filtration(n))}};
}

Json rep_grpsi(const Args& a) {
  const auto model = load_rep(a);
  const GroupRep& rep = model.rep;
  const auto g = graded_nearby_cycles(rep, single_word(a, rep, "1"));
  return Json{{"gr_dims", gr_dims(g.filtration)}, {"blocks", g.blocks}, {"rep", io::rep_payload(g.rep)}};
}

Json rep_ss(const Args& a) {
  const auto model = load_rep(a);
  const GroupRep& rep = model.rep;
  const auto s = semisimplify(rep);
  return Json{{"blocks", s.blocks}, {"rep", io::rep_payload(s.rep)}};
}

Json rep_qu(const Args& a) {
  const auto model = load_rep(a);
  const GroupRep& rep = model.rep;
  std::vector<Word> loops;
  for (const auto& s : a.words) loops.push_back(parse_word(s));
  if (loops.empty())
    for (std::size_t i = 1; i <= rep.presentation().generators(); ++i) loops.push_back({static_cast<int>(i)});
  Json orders = Json::array();
  std::optional<unsigned long> lcm = 1;
  for (const auto& w : loops) {
    rep.presentation().check_word(w);
    const auto o = quasiunipotent_order(rep.evaluate(w));
    orders.push_back(o ? Json(*o) : Json(nullptr));
    lcm = (o && lcm) ? std::optional<unsigned long>(std::lcm(*lcm, *o)) : std::nullopt;
  }
  return Json{{"orders", orders}, {"exponent", lcm ? Json(*lcm) : Json(nullptr)}};
}

Json rep_charb(const Args& a) {
  const auto model = load_rep(a);
  const GroupRep& rep = model.rep;
  Json coeffs = Json::array();
  for (const auto& c : char_b(rep, single_word(a, rep, ""))) coeffs.push_back(io::element_json(c));
  return Json{{"coefficients", coeffs}};
}

Json tangent_json(const TangentSpace& t) {
  return Json{{"dimZ1", t.dim_z1}, {"dimB1", t.dim_b1}, {"dimH1", t.dim_h1()}};
}

Json deform_tangent(const Args& a) {
  return tangent_json(tangent_space(load_rep(a).rep));
}

Json deform_lift(const Args& a) {
  const auto model = load_rep(a);
  const GroupRep& rep = model.rep;
  if (!model.cocycle) throw ValidationError(a.files[0] + ": deform lift needs a \"cocycle\" field");
  const auto r = lift_order(rep, *model.cocycle, a.order);
  Json lift{{"order", r.order_reached}, {"requested", a.order}, {"status", r.success ? "lifted" : "obstructed"}};
  Json coeffs = Json::array();
  for (const auto& c : r.coefficients) {
    Json cj = Json::array();
    for (const auto& x : c) cj.push_back(io::kmatrix_json(x));
    coeffs.push_back(cj);
  }
  lift["coefficients"] = coeffs;
  if (!r.success) {
    Json res = Json::array();
    for (const auto& x : r.residuals) res.push_back(io::kmatrix_json(x));
    lift["residuals"] = res;
  }
  Json out = tangent_json(tangent_space(rep));
  out["lift"] = lift;
  return out;
}

io::ResiduesModel load_residues(const Args& a) {
  need_files(a, 1);
  return expect<io::ResiduesModel>(load(a.files[0]), a.files[0]);
}

Json gaussian(const GaussianRational& z) { return Json::array({io::rational_json(z.re), io::rational_json(z.im)}); }

Json kms(const Args& a) {
  const auto r = load_residues(a);
  Json items = Json::array();
  for (const auto& x : r.items) {
    const auto y = a.inverse ? kms_unrescale(x, r.lambda) : kms_rescale(x, r.lambda);
    items.push_back(Json{{"weight", io::rational_json(y.weight)}, {"residue", gaussian(y.residue)}});
  }
  return Json{{"lambda", gaussian(r.lambda)}, {"items", items}, {"inverse", a.inverse}};
}

Json residue_exp(const Args& a) {
  const auto r = load_residues(a);
  Json out = Json::array();
  for (std::size_t i = 0; i < r.items.size(); ++i) {
    if (sgn(r.items[i].residue.im) != 0)
      throw ValidationError("item " + std::to_string(i) + ": residue exponential needs a real residue");
    out.push_back(io::rational_json(residue_exponential(r.items[i].residue.re)));
  }
  return Json{{"exponents", out}};
}

void emit_error(std::ostream& out, std::ostream& err, const std::string& what) {
  out << Json{{"error", what}}.dump() << "\n";
  err << "error: " << what << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Args a;
  CLI::App app{"Exact computations with norms, harmonic maps and local systems", "hodgekit"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--tol", a.tol, "Convergence tolerance");
  app.add_option("--max-sweeps", a.max_sweeps, "Sweep limit for iterative solvers");
  app.add_option("--place", a.place, "Prime p of the building");

  using Handler = Json (*)(const Args&);
  std::vector<std::pair<CLI::App*, Handler>> leaves;
  auto group = [&](const char* name, const char* help) {
    auto* g = app.add_subcommand(name, help);
    g->require_subcommand(1);
    g->fallthrough();
    return g;
  };
  auto leaf = [&](CLI::App* parent, const char* name, const char* help, Handler h) {
    auto* s = parent->add_subcommand(name, help);
    s->fallthrough();
    s->add_option("files", a.files, "Input model files")->required();
    leaves.emplace_back(s, h);
    return s;
  };

  auto* norm = group("norm", "Norms on Q^n over a p-adic place");
  leaf(norm, "dist", "Distances between two norms", norm_dist);
  leaf(norm, "spectrum", "Relative spectrum and a common orthogonal basis", norm_spectrum);
  leaf(norm, "com", "Center of mass of norms", norm_com)->add_option("--mass", a.masses, "Mass per file (repeatable)");
  auto* harmonic = group("harmonic", "Harmonic maps on graphs");
  leaf(harmonic, "solve", "Dirichlet or equivariant energy minimization", harmonic_solve);
  auto* rep = group("rep", "Representations of finitely presented groups");
  leaf(rep, "weightfilt", "Weight filtration of rho(w) - I", rep_weightfilt)->add_option("--word", a.words);
  leaf(rep, "grpsi", "Graded nearby cycles along gamma", rep_grpsi)->add_option("--word", a.words);
  leaf(rep, "ss", "Semisimplification", rep_ss);
  leaf(rep, "qu", "Quasiunipotence orders", rep_qu)->add_option("--word", a.words, "Loop (repeatable)");
  leaf(rep, "charb", "Characteristic polynomial of rho(w)", rep_charb)->add_option("--word", a.words);
  auto* deform = group("deform", "First-order deformations");
  leaf(deform, "tangent", "Dimensions of Z^1, B^1, H^1", deform_tangent);
  leaf(deform, "lift", "Lift the file's cocycle order by order", deform_lift)->add_option("--order", a.order);
  leaf(&app, "kms", "KMS rescaling of weight/residue pairs", kms)->add_flag("--inverse", a.inverse);
  auto* residue = group("residue", "Residues");
  leaf(residue, "exp", "Root of unity attached to each residue", residue_exp);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error(out, err, e.what());
    return kExitValidation;
  }

  try {
    for (const auto& [cmd, handler] : leaves)
      if (cmd->parsed()) {
        out << handler(a).dump() << "\n";
        return kExitOk;
      }
    throw ValidationError("missing subcommand");
  } catch (const ValidationError& e) {
    emit_error(out, err, e.what());
    return kExitValidation;
  } catch (const InvariantError& e) {
    emit_error(out, err, std::string("invariant violated: ") + e.what());
    return kExitInvariant;
  } catch (const std::exception& e) {
    emit_error(out, err, e.what());
    return kExitInvariant;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace hk::cli
