// spaceform: verification suites, the mixed BVP solver and identity checks.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
// error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spaceform/horolens.hpp"
#include "spaceform/mesh.hpp"
#include "spaceform/suites.hpp"

using namespace spaceform;

namespace {

struct Options {
  std::string case_name = "all";
  double R = 1.0;
  double alpha = 0.3;
  double b = 0.25;
  std::vector<double> c_tilde;
  int dim = 2;
  int levels = 4;
  int quad = 4;
  std::uint64_t seed = 20240601;
  std::string out;
  double tol = 0.0;
  std::vector<double> a_grid;
  int samples = 1000;
  std::vector<double> cap_center;
  double cap_radius = 0.0;
  double cap_eps = 0.0;
  int cap_lobes = 0;
  double cap_phase = 0.0;
  bool graded = false;
  std::string recovery = "facet";
};

struct Flags {
  CLI::Option* dim = nullptr;
  CLI::Option* tol = nullptr;
  CLI::Option* c_tilde = nullptr;
  CLI::Option* kase = nullptr;
};

Flags add_common(CLI::App* sub, Options& o) {
  Flags f;
  f.kase = sub->add_option("--case", o.case_name, "support case: 1-4, its name, or all");
  sub->add_option("--R", o.R, "radius of the geodesic sphere (cases 1 and 4)");
  sub->add_option("--alpha", o.alpha, "angle of the equidistant hyperplane (case 2)");
  sub->add_option("--b", o.b, "two-horosphere example parameter in (0, 1/2)");
  f.c_tilde = sub->add_option("--ctilde", o.c_tilde, "Robin constant(s)")->delimiter(',');
  f.dim = sub->add_option("--dim", o.dim, "ambient dimension n+1");
  sub->add_option("--levels", o.levels, "number of mesh levels");
  sub->add_option("--quad", o.quad, "quadrature level");
  sub->add_option("--seed", o.seed, "sampling seed");
  sub->add_option("--out", o.out, "output file (directory for solve)");
  f.tol = sub->add_option("--tol", o.tol, "tolerance override");
  sub->add_option("--a-grid", o.a_grid, "constants a of the integral identity")->delimiter(',');
  sub->add_option("--samples", o.samples, "random samples per check");
  return f;
}

void write_report(const VerificationReport& rep, const std::string& out) {
  if (out.empty()) {
    write_json_lines(std::cout, rep);
    return;
  }
  std::ofstream os(out);
  if (!os) throw ConfigError("cannot write " + out);
  write_json_lines(os, rep);
}

int finish(const VerificationReport& rep) {
  int failed = 0;
  for (const auto& r : rep.records())
    if (!r.pass) {
      if (failed++ == 0) std::fprintf(stderr, "%-44s %-12s %-12s\n", "failed check", "residual", "tolerance");
      std::fprintf(stderr, "%-44s %-12.4e %-12.4e\n", r.name.c_str(), r.residual, r.tolerance);
    }
  std::fprintf(stderr, "%zu checks, %d failed\n", rep.size(), failed);
  return rep.all_pass() ? 0 : 1;
}

std::vector<CaseId> selected_cases(const std::string& name) {
  if (name == "all") return {std::begin(kAllCases), std::end(kAllCases)};
  return {parse_case(name)};
}

SuiteConfig suite_config(const Options& o, const Flags& f) {
  SuiteConfig cfg;
  cfg.seed = o.seed;
  cfg.samples = o.samples;
  if (f.dim->count()) cfg.dims = {o.dim};
  cfg.R = o.R;
  cfg.alpha = o.alpha;
  cfg.b = o.b;
  if (f.c_tilde->count()) cfg.c_tilde_grid = o.c_tilde;
  cfg.a_grid = o.a_grid;
  cfg.quad_level = o.quad;
  cfg.fem_levels = o.levels;
  if (o.samples < 1) throw ConfigError("--samples must be positive");
  return cfg;
}

void require_planar(const Options& o) {
  if (o.dim != 2) throw ConfigError("meshing and the lens domain are implemented for --dim 2 only");
}

int cmd_verify_fields(const Options& o, const Flags& f) {
  const SuiteConfig cfg = suite_config(o, f);
  const double tol = f.tol->count() ? o.tol : 1e-8;
  VerificationReport rep;
  for (int dim : cfg.dims)
    for (CaseId id : selected_cases(o.case_name)) {
      const UmbilicalCase c = make_case(id, id == CaseId::EquidistantH ? o.alpha : o.R, dim);
      CounterRng rng(cfg.seed, CounterRng::stream_id("fields") + 16 * dim + c.index());
      rep.append(field_identity_suite(c, cfg.samples, rng, tol));
    }
  write_report(rep, o.out);
  return finish(rep);
}

int cmd_verify_auxfn(const Options& o, const Flags& f) {
  const SuiteConfig cfg = suite_config(o, f);
  for (const std::string& r : f.c_tilde->results())
    if (r.find_first_not_of(" \t") == std::string::npos) throw ConfigError("empty c~ grid");
  if (f.c_tilde->count() && o.c_tilde.empty()) throw ConfigError("empty c~ grid");
  const double tol = f.tol->count() ? o.tol : 1e-9;
  VerificationReport rep;
  for (int dim : cfg.dims)
    for (CaseId id : selected_cases(o.case_name)) {
      const UmbilicalCase c = make_case(id, id == CaseId::EquidistantH ? o.alpha : o.R, dim);
      for (double ct : cfg.c_tilde_grid) {
        CounterRng rng(cfg.seed, CounterRng::stream_id("auxfn") + 16 * dim + c.index());
        const AuxFunction aux = AuxFunction::for_case(c, ct);
        std::fprintf(stderr, "case %d dim %d c~ %g: c0 = %.12g\n", c.index(), dim, ct, aux.c0());
        rep.append(verify_resolvent(aux, cfg.samples, rng, tol));
        const double lp = phi_p_laplacian(aux, cfg.samples, rng);
        rep.add(make_check("resolvent.p_laplacian", lp, 0.0, lp, 1e-8).input("c_tilde", ct).input("c0", aux.c0()));
      }
    }
  write_report(rep, o.out);
  return finish(rep);
}

int cmd_run_example(const Options& o) {
  require_planar(o);
  const HoroLens h(o.b);
  std::fprintf(stderr, "b %g: c~ = %.12g, cos(theta) = %.12g, theta = %.9g deg\n", o.b, h.c_tilde(), h.cos_theta(),
               h.theta() * 180.0 / std::numbers::pi);
  CounterRng rng(o.seed, CounterRng::stream_id("horolens"));
  const VerificationReport rep = horolens_report(h, o.samples, rng);
  write_report(rep, o.out);
  return finish(rep);
}

LensDomain solve_domain(const Options& o, BvpParams& params, std::optional<HoroLens>& lens) {
  if (o.case_name == "all" || o.case_name == "horolens") {
    lens.emplace(o.b);
    params = {1.0, lens->c_tilde()};
    return lens->domain();
  }
  const CaseId id = parse_case(o.case_name);
  const UmbilicalCase c = make_case(id, id == CaseId::EquidistantH ? o.alpha : o.R);
  if (o.cap_center.size() != 2 || !(o.cap_radius > 0.0))
    throw ConfigError("a support case needs --cap-center x,y and --cap-radius");
  if (o.c_tilde.size() > 1) throw ConfigError("solve takes a single --ctilde");
  params = {c.kappa(), o.c_tilde.empty() ? 0.0 : o.c_tilde.front()};
  return make_cap(c, CapSpec{o.cap_center, o.cap_radius, o.cap_eps, o.cap_lobes, o.cap_phase});
}

int cmd_solve(const Options& o) {
  require_planar(o);
  if (o.out.empty()) throw ConfigError("solve needs --out <directory>");
  BvpParams params;
  std::optional<HoroLens> lens;
  const LensDomain D = solve_domain(o, params, lens);
  RigidityOptions ropt;
  if (o.recovery == "residual") ropt.recovery = FluxRecovery::GalerkinResidual;
  else if (o.recovery != "facet") throw ConfigError("--recovery must be facet or residual");
  std::function<double(const Vec&)> oracle;
  if (lens) oracle = [h = *lens](const Vec& x) { return h.u_expr(std::span<const double>(x)); };
  ConvergenceStudy s;
  try {
    s = convergence_study(D, params, o.levels, oracle, ropt, MeshOptions{.graded = o.graded});
  } catch (const CoercivityError&) {
    const double lambda = estimate_lambda1(generate_cap_mesh(D, 0), D.model()).lambda1;
    std::fprintf(stderr, "coarse-mesh estimate lambda1_h = %.6g, needs to exceed (n+1)K = %d\n", lambda,
                 D.model().dim() * D.model().curvature());
    throw;
  }
  std::filesystem::create_directories(o.out);
  const std::filesystem::path dir(o.out);
  {
    std::ofstream os(dir / "mesh.txt");
    write_mesh(os, s.finest_solution->mesh);
  }
  {
    CsvTable sol({"x", "y", "u"});
    const BvpSolution& fs = *s.finest_solution;
    for (std::size_t v = 0; v < fs.mesh.num_vertices(); ++v)
      sol.add_row({fs.mesh.vertices[v][0], fs.mesh.vertices[v][1], fs.values[v]});
    std::ofstream os(dir / "solution.csv");
    sol.write(os);
  }
  {
    std::ofstream os(dir / "convergence.csv");
    s.table.write(os);
  }
  VerificationReport rep;
  if (lens) {
    rep = solver_report(*lens, s);
  } else {
    const RigidityReport& r = s.finest;
    rep.add(make_check("rigidity.flux_spread", r.c_stddev, r.c_mean, r.c_stddev / std::abs(r.c_mean), ropt.threshold)
                .label("status", r.status)
                .input("inferred_curvature", r.inferred_curvature)
                .input("predicted_angle", r.predicted_angle)
                .input("measured_angle", r.measured_angle)
                .input("min_u", r.min_u));
  }
  std::fprintf(stderr, "%s\n", s.finest.status.c_str());
  std::ofstream os(dir / "report.jsonl");
  write_json_lines(os, rep);
  return finish(rep);
}

int cmd_check_identity(const Options& o, const Flags& f) {
  require_planar(o);
  const HoroLens h(o.b);
  AuxFunction aux = h.aux();
  if (f.c_tilde->count()) {
    if (o.c_tilde.size() != 1) throw ConfigError("check-identity takes a single --ctilde");
    // phi built for a different Robin constant than u carries.
    const double ct = o.c_tilde.front(), c0 = 1.0 / h.dim() - ct;
    aux = AuxFunction(aux.support(), ct, c0, aux.base_point(), c0);
  }
  const std::vector<double> grid = o.a_grid.empty() ? std::vector<double>{-1.0, 0.0, h.c() * h.c(), 5.0} : o.a_grid;
  VerificationReport rep;
  const LensDomain D = h.domain();
  for (double a : grid)
    for (int l = std::min(1, o.quad); l <= o.quad; ++l)
      rep.add(to_record(check_integral_identity(D, h.u_field(), aux, h.support_potential(), a, l), "identity.level",
                        1e-6));
  rep.append(identity_series(h, grid, o.quad, aux));
  for (const auto& r : rep.records())
    if (r.name == "identity.quadrature" && !r.pass)
      std::fprintf(stderr, "warning: quadrature level %d is too coarse (relative error %.3g)\n", o.quad, r.residual);
  write_report(rep, o.out);
  return finish(rep);
}

int cmd_report(const Options& o, const Flags& f) {
  const SuiteConfig cfg = suite_config(o, f);
  VerificationReport rep;
  for (int k = 1; k <= kCriterionCount; ++k) {
    const VerificationReport part = run_criterion(k, cfg);
    std::fprintf(stderr, "criterion %d: %s (%zu checks)\n", k, part.all_pass() ? "pass" : "FAIL", part.size());
    rep.append(part);
  }
  write_report(rep, o.out);
  return finish(rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification suites for mixed boundary problems on caps in space forms"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key = value file with one [section] per command");
  Options o;
  auto* fields = app.add_subcommand("verify-fields", "conformal Killing identities of the support cases");
  auto* auxfn = app.add_subcommand("verify-auxfn", "auxiliary function over a grid of Robin constants");
  auto* example = app.add_subcommand("run-example", "closed-form two-horosphere example");
  auto* solve = app.add_subcommand("solve", "mesh, solve and check rigidity across levels");
  auto* identity = app.add_subcommand("check-identity", "integral identity over constants a and levels");
  auto* report = app.add_subcommand("report", "all acceptance suites");
  std::vector<Flags> flags;
  for (auto* sub : {fields, auxfn, example, solve, identity, report}) flags.push_back(add_common(sub, o));
  solve->add_option("--cap-center", o.cap_center, "chart center of the Sigma curve")->delimiter(',');
  solve->add_option("--cap-radius", o.cap_radius, "base radius of the Sigma curve");
  solve->add_option("--cap-eps", o.cap_eps, "star perturbation amplitude");
  solve->add_option("--cap-lobes", o.cap_lobes, "star perturbation lobes");
  solve->add_option("--cap-phase", o.cap_phase, "star perturbation phase");
  solve->add_flag("--graded", o.graded, "grade the mesh toward the corners");
  solve->add_option("--recovery", o.recovery, "flux recovery: facet or residual");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (*fields) return cmd_verify_fields(o, flags[0]);
    if (*auxfn) return cmd_verify_auxfn(o, flags[1]);
    if (*example) return cmd_run_example(o);
    if (*solve) return cmd_solve(o);
    if (*identity) return cmd_check_identity(o, flags[4]);
    if (*report) return cmd_report(o, flags[5]);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "check failed: %s\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const InconsistencyError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
