#include "rnm/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rnm/fock.hpp"
#include "rnm/mc.hpp"
#include "rnm/model.hpp"
#include "rnm/oracle.hpp"

namespace rnm::runner {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using config::ConfigError;
using config::format_double;

namespace {

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
}

// the grid actually built: ladder cutoffs become radial panel edges so that
// every restriction is an exact sub-rule
grid::GridPtr grid_for(const config::RunConfig& cfg) {
  grid::GridParams gp = cfg.grid;
  auto add_break = [&](const Cutoff& c) {
    if (!c.is_finite()) return;
    const double r = c.radius();
    if (!(r <= gp.r_max))
      throw ConfigError("cutoff " + format_double(r) + " exceeds grid.r_max");
    if (r == gp.r_max || r == 0.0) return;
    for (double b : gp.breaks)
      if (b == r) return;
    gp.breaks.push_back(r);
  };
  for (const auto& c : cfg.cutoff_ladder()) add_break(c);
  add_break(cfg.lambda);
  std::sort(gp.breaks.begin(), gp.breaks.end());
  return grid::GridSpec::build(gp);
}

json lambda_json(const Cutoff& c) {
  return c.is_finite() ? json(c.radius()) : json("inf");
}

json grid_json(const grid::GridSpec& g) {
  json j;
  j["radial"] = g.n_radial();
  j["angular"] = g.n_angular();
  j["r_max"] = g.r_max();
  j["panel_edges"] = g.panel_edges();
  return j;
}

json params_json(const ModelParams& p) {
  json j;
  j["m_p"] = p.m_p;
  j["m_b"] = p.m_b;
  j["g"] = p.g;
  return j;
}

json record(const std::string& quantity, const config::RunConfig& cfg,
            const grid::GridSpec& g, const Vec2& xi, double t,
            const Cutoff& lambda, const mc::Estimate& est,
            const std::string& notes) {
  json j;
  j["quantity"] = quantity;
  j["params"] = params_json(cfg.model);
  j["xi"] = {xi.x, xi.y};
  j["t"] = t;
  j["lambda"] = lambda_json(lambda);
  j["mean_re"] = est.mean.real();
  j["mean_im"] = est.mean.imag();
  j["std_err"] = est.std_err;
  j["n_paths"] = est.n;
  j["seed"] = cfg.seed;
  j["grid"] = grid_json(g);
  j["eps"] = cfg.eps;
  j["notes"] = notes;
  return j;
}

std::string estimates_csv(const std::vector<json>& records) {
  std::ostringstream os;
  os << "quantity,xi_x,xi_y,t,lambda,mean_re,mean_im,std_err,n_paths,seed,eps\n";
  for (const auto& r : records) {
    const auto& xi = r["xi"];
    const auto& lam = r["lambda"];
    os << r["quantity"].get<std::string>() << ","
       << format_double(xi[0].get<double>()) << ","
       << format_double(xi[1].get<double>()) << ","
       << format_double(r["t"].get<double>()) << ","
       << (lam.is_string() ? lam.get<std::string>()
                           : format_double(lam.get<double>()))
       << "," << format_double(r["mean_re"].get<double>()) << ","
       << format_double(r["mean_im"].get<double>()) << ","
       << format_double(r["std_err"].get<double>()) << ","
       << r["n_paths"].get<std::uint64_t>() << ","
       << r["seed"].get<std::uint64_t>() << ","
       << format_double(r["eps"].get<double>()) << "\n";
  }
  return os.str();
}

void write_manifest(const RunContext& ctx, const std::string& sub,
                    const std::vector<std::string>& outputs, int status,
                    const json& overrides = json()) {
  json m;
  m["experiment"] = ctx.cfg.experiment;
  m["subcommand"] = sub;
  m["config_hash"] = ctx.cfg.hash();
  m["config"] = ctx.cfg.canonical();
  if (!overrides.is_null()) m["overrides"] = overrides;
  m["outputs"] = outputs;
  m["status"] = status;
  write_file(fs::path(ctx.outdir) / "manifest.json", m.dump(2) + "\n");
}

mc::RunParams run_params(const RunContext& ctx, double t) {
  mc::RunParams run;
  run.t = t;
  run.eps = ctx.cfg.eps;
  run.n_paths = ctx.cfg.n_paths;
  run.seed = ctx.cfg.seed;
  run.threads = ctx.threads;
  return run;
}

// smallest finite cutoff of the ladder, else the whole-disc cutoff; used
// where a probe needs a concrete finite ball
Cutoff probe_cutoff(const config::RunConfig& cfg, const grid::GridSpec& g) {
  Cutoff best = Cutoff::finite(g.r_max());
  for (const auto& c : cfg.cutoff_ladder())
    if (c.is_finite() && c.radius() > 0.0 && c.radius() < best.radius())
      best = c;
  if (cfg.lambda.is_finite() && cfg.lambda.radius() > 0.0 &&
      cfg.lambda.radius() < best.radius())
    best = cfg.lambda;
  return best;
}

double sorted_quantile(std::vector<double>& v, double q) {
  std::sort(v.begin(), v.end());
  if (v.empty()) return 0.0;
  const auto idx = std::min(v.size() - 1,
                            static_cast<size_t>(q * static_cast<double>(v.size())));
  return v[idx];
}

}  // namespace

int run_validate(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  fs::create_directories(ctx.outdir);
  auto g = grid_for(cfg);
  const Vec2 xi0 = cfg.xis[0];
  const double t0 = cfg.times[0];

  std::vector<json> checks;
  auto add = [&](const std::string& name, double residual, double budget,
                 const std::string& notes) {
    json j;
    j["check"] = name;
    j["residual"] = residual;
    j["budget"] = budget;
    j["pass"] = residual <= budget;
    j["notes"] = notes;
    checks.push_back(j);
  };

  // jump measure integrates back to the dispersion relation
  {
    double worst = 0.0;
    for (double q : {0.3, 1.0, 3.0})
      for (double m : {0.5, 1.0, 2.0}) {
        const double direct = model::psi_norm(q, m);
        const double fromnu = model::symbol_from_levy(q, m);
        worst = std::max(worst, std::abs(fromnu - direct) / (1.0 + direct));
      }
    add("symbol_reconstruction", worst, 1e-5,
        "|int (1-cos xi.z) nu dz - psi| / (1+psi) over a (xi, m_p) grid");
  }

  // renormalization constant vs the equal-mass closed form
  {
    double worst = 0.0;
    for (double m : {0.5, 1.0, 2.0})
      for (double l : {1.0, 4.0}) {
        ModelParams p{m, m, cfg.model.g > 0.0 ? cfg.model.g : 1.0};
        const double got = model::e_ren(p, Cutoff::finite(l));
        const double want = model::e_ren_closed_equal_mass(m, p.g, l);
        worst = std::max(worst, std::abs(got - want) / std::abs(want));
      }
    add("renormalization_constant", worst, 1e-8,
        "quadrature E_ren vs closed form at equal masses");
  }

  // grid quadrature reproduces the coupling norm
  {
    const auto v = grid::FieldVector::from_radial(
        g, [&](double r) { return model::coupling_v_norm(r, cfg.model); });
    double worst = 0.0;
    auto check_ball = [&](const Cutoff& c) {
      const double want = model::coupling_norm2(cfg.model, c);
      if (want <= 0.0) return;
      const double got = grid::norm2(grid::cutoff_mask(c, v));
      worst = std::max(worst, std::abs(got - want) / want);
    };
    check_ball(Cutoff::finite(g->r_max()));
    for (const auto& c : cfg.cutoff_ladder())
      if (c.is_finite() && c.radius() > 0.0) check_ball(c);
    add("grid_coupling_norm", worst, cfg.grid_tol,
        "||v||^2 on the grid vs the closed form, per cutoff ball");
  }

  // the two action forms agree pathwise
  {
    std::vector<Cutoff> fin;
    for (const auto& c : cfg.cutoff_ladder())
      if (c.is_finite() && c.radius() > 0.0) fin.push_back(c);
    if (fin.empty()) fin.push_back(Cutoff::finite(g->r_max()));
    action::EvalOptions opts;
    opts.cutoffs = fin;
    opts.eren = cfg.eren;
    opts.want_defining = true;
    action::PathEvaluator ev(cfg.model, g, opts);
    const std::uint64_t n = std::min<std::uint64_t>(200, cfg.n_paths);
    std::vector<double> res;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto path = levy::sample_path(t0, cfg.eps, cfg.model.m_p,
                                          cfg.seed, i);
      for (const auto& F : ev.evaluate(path)) {
        res.push_back(std::max(std::abs(F.u_defining - F.u.real()),
                               std::abs(F.u.imag())));
      }
    }
    std::vector<double> med = res;
    add("action_identity_median", sorted_quantile(med, 0.5), cfg.tol_id / 10.0,
        "pathwise |defining - Ito| and |Im u|, median");
    add("action_identity_p99", sorted_quantile(res, 0.99), cfg.tol_id,
        "pathwise |defining - Ito| and |Im u|, 99th percentile");
  }

  // rank-one dressing flow: direct element vs composition through a split
  {
    action::EvalOptions opts;
    opts.cutoffs = {probe_cutoff(cfg, *g)};
    opts.eren = cfg.eren;
    opts.want_fields = true;
    action::PathEvaluator ev(cfg.model, g, opts);
    const auto f = grid::FieldVector::from_radial(
        g, [](double r) { return 0.3 * std::exp(-r * r); });
    const auto h = grid::FieldVector::from_radial(
        g, [](double r) { return 0.2 * std::exp(-0.5 * r * r); });
    double worst = 0.0;
    const int n = 20;
    for (int i = 0; i < n; ++i) {
      const auto path = levy::sample_path(t0, cfg.eps, cfg.model.m_p,
                                          cfg.seed, i);
      const double s = t0 * (i + 0.5) / n;
      worst = std::max(worst, fock::flow_check(ev, path, s, 0, xi0, f, h));
    }
    add("dressing_flow", worst, 1e-8,
        "propagator element vs split composition on sampled paths");
  }

  // truncated-basis semigroup algebra on a small probe space
  {
    grid::GridParams pg;
    pg.radial = 4;
    pg.angular = 4;
    pg.r_max = probe_cutoff(cfg, *g).radius();
    auto probe = grid::GridSpec::build(pg);
    auto space = oracle::make_space(*probe, Cutoff::finite(pg.r_max),
                                    std::min(cfg.n_max, 2), cfg.max_dim);
    auto op = oracle::build_fiber(space, cfg.model, xi0, cfg.eren);
    add("oracle_semigroup_product",
        oracle::semigroup_product_gap(op, 0.4 * t0, 0.6 * t0), 1e-8,
        "|T_{s+t} - T_s T_t| on a probe basis, dim " +
            std::to_string(space.dim()));
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(space.dim());
    vac[space.vacuum()] = 1.0;
    const double r1 = oracle::generator_residual(op, 1e-2, vac);
    const double r2 = oracle::generator_residual(op, 1e-3, vac);
    add("oracle_generator_order", r2 / r1, 0.6,
        "finite-difference generator residual must shrink ~linearly in h");
  }

  // the path stream is a pure function of (seed, index)
  {
    std::ostringstream a, b, c;
    levy::dump_csv(a, levy::sample_path(t0, cfg.eps, cfg.model.m_p, cfg.seed, 0));
    levy::dump_csv(b, levy::sample_path(t0, cfg.eps, cfg.model.m_p, cfg.seed, 0));
    levy::dump_csv(c, levy::sample_path(t0, cfg.eps, cfg.model.m_p, cfg.seed, 1));
    const bool ok = a.str() == b.str() && a.str() != c.str();
    add("path_stream_repeatability", ok ? 0.0 : 1.0, 0.5,
        "same (seed, index) replays identically; different index differs");
  }

  bool all = true;
  for (const auto& c : checks) all = all && c["pass"].get<bool>();
  json report;
  report["config_hash"] = cfg.hash();
  report["checks"] = checks;
  report["pass"] = all;
  write_file(fs::path(ctx.outdir) / "validate.json", report.dump(2) + "\n");
  const int status = all ? kExitOk : kExitBudget;
  write_manifest(ctx, "validate", {"validate.json"}, status);
  return status;
}

int run_semigroup(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  fs::create_directories(ctx.outdir);
  auto g = grid_for(cfg);
  const auto ladder = cfg.cutoff_ladder();
  action::EvalOptions opts;
  opts.cutoffs = ladder;
  opts.eren = cfg.eren;
  action::PathEvaluator ev(cfg.model, g, opts);

  std::vector<json> records;
  for (double t : cfg.times) {
    for (const Vec2& xi : cfg.xis) {
      mc::PairingSpec spec;
      spec.xi = xi;
      const auto ests = mc::fiber_semigroup(ev, spec, run_params(ctx, t));
      for (size_t ci = 0; ci < ladder.size(); ++ci)
        records.push_back(record("fiber_semigroup", cfg, *g, xi, t, ladder[ci],
                                 ests[ci], "vacuum labels"));
    }
  }
  json out;
  out["config_hash"] = cfg.hash();
  out["records"] = records;
  write_file(fs::path(ctx.outdir) / "results.json", out.dump(2) + "\n");
  write_file(fs::path(ctx.outdir) / "estimates.csv", estimates_csv(records));
  write_manifest(ctx, "semigroup", {"results.json", "estimates.csv"}, kExitOk);
  return kExitOk;
}

int run_sweep(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  fs::create_directories(ctx.outdir);
  auto g = grid_for(cfg);
  const auto ladder = cfg.cutoff_ladder();
  action::EvalOptions opts;
  opts.cutoffs = ladder;
  opts.eren = cfg.eren;
  action::PathEvaluator ev(cfg.model, g, opts);

  std::vector<json> records;
  for (double t : cfg.times) {
    for (const Vec2& xi : cfg.xis) {
      mc::PairingSpec spec;
      spec.xi = xi;
      const auto sw = mc::lambda_sweep(ev, spec, run_params(ctx, t));
      for (size_t ci = 0; ci < ladder.size(); ++ci)
        records.push_back(record("lambda_sweep", cfg, *g, xi, t, ladder[ci],
                                 sw.value[ci], "common paths across cutoffs"));
      for (size_t ci = 0; ci + 1 < ladder.size(); ++ci)
        records.push_back(record(
            "lambda_sweep_diff", cfg, *g, xi, t, ladder[ci + 1], sw.diff[ci],
            "difference to previous cutoff " + ladder[ci].str()));
    }
  }
  json out;
  out["config_hash"] = cfg.hash();
  out["records"] = records;
  write_file(fs::path(ctx.outdir) / "results.json", out.dump(2) + "\n");
  write_file(fs::path(ctx.outdir) / "estimates.csv", estimates_csv(records));
  write_manifest(ctx, "sweep", {"results.json", "estimates.csv"}, kExitOk);
  return kExitOk;
}

int run_oracle(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.lambda.is_finite())
    throw ConfigError("oracle: lambda must be finite (truncated basis)");
  fs::create_directories(ctx.outdir);
  auto g = grid_for(cfg);
  auto space = oracle::make_space(*g, cfg.lambda, cfg.n_max, cfg.max_dim);

  std::vector<json> fiber_rows;
  for (const Vec2& xi : cfg.xis) {
    auto op = oracle::build_fiber(space, cfg.model, xi, cfg.eren);
    json j;
    j["xi"] = {xi.x, xi.y};
    j["lambda"] = lambda_json(cfg.lambda);
    j["modes"] = space.modes();
    j["n_max"] = cfg.n_max;
    j["dim"] = space.dim();
    j["e0"] = op.ground_energy();
    j["e_ren"] = op.e_ren;
    j["e0_unren"] = op.ground_energy() - op.e_ren;
    fiber_rows.push_back(j);
  }

  const auto scan = oracle::renormalization_scan(
      cfg.model, cfg.scan_lambdas, cfg.xis[0], cfg.n_max,
      cfg.scan_radial_per_octave, cfg.scan_angular, cfg.max_dim);
  std::vector<json> scan_rows;
  for (const auto& r : scan) {
    json j;
    j["lambda"] = r.lambda;
    j["xi"] = {r.xi.x, r.xi.y};
    j["modes"] = r.modes;
    j["n_max"] = r.n_max;
    j["e0"] = r.e0;
    j["e0_unren"] = r.e0_unren;
    j["pt_residual"] = r.pt_residual;
    scan_rows.push_back(j);
  }
  std::ostringstream csv;
  oracle::write_scan_csv(csv, scan);

  json out;
  out["config_hash"] = cfg.hash();
  out["fiber"] = fiber_rows;
  out["scan"] = scan_rows;
  write_file(fs::path(ctx.outdir) / "oracle.json", out.dump(2) + "\n");
  write_file(fs::path(ctx.outdir) / "scan.csv", csv.str());
  write_manifest(ctx, "oracle", {"oracle.json", "scan.csv"}, kExitOk);
  return kExitOk;
}

int run_compare(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.lambda.is_finite())
    throw ConfigError("compare: lambda must be finite (truncated basis)");
  fs::create_directories(ctx.outdir);
  auto g = grid_for(cfg);

  bool all = true;
  std::vector<json> rows;
  for (const Vec2& xi : cfg.xis) {
    const auto cmp =
        mc::mc_vs_oracle(cfg.model, g, cfg.lambda, xi, {}, {}, cfg.n_max,
                         run_params(ctx, cfg.times[0]), cfg.max_dim);
    const double budget = 3.0 * cmp.mc.std_err + cfg.compare_budget;
    const double rel_se =
        cmp.mc.std_err / std::max(1e-300, std::abs(cmp.mc.mean));
    const bool pass = cmp.gap <= budget && rel_se <= 0.01;
    all = all && pass;
    json j;
    j["xi"] = {xi.x, xi.y};
    j["t"] = cfg.times[0];
    j["lambda"] = lambda_json(cfg.lambda);
    j["mc_re"] = cmp.mc.mean.real();
    j["mc_im"] = cmp.mc.mean.imag();
    j["std_err"] = cmp.mc.std_err;
    j["oracle_re"] = cmp.oracle.real();
    j["oracle_im"] = cmp.oracle.imag();
    j["gap"] = cmp.gap;
    j["budget"] = budget;
    j["rel_std_err"] = rel_se;
    j["modes"] = cmp.modes;
    j["dim"] = cmp.dim;
    j["pass"] = pass;
    rows.push_back(j);
  }
  json out;
  out["config_hash"] = cfg.hash();
  out["n_paths"] = cfg.n_paths;
  out["records"] = rows;
  out["pass"] = all;
  write_file(fs::path(ctx.outdir) / "compare.json", out.dump(2) + "\n");
  const int status = all ? kExitOk : kExitBudget;
  write_manifest(ctx, "compare", {"compare.json"}, status);
  return status;
}

int run_paths(const RunContext& ctx, const PathDumpArgs& args) {
  if (args.n == 0 || args.n > 1000000)
    throw ConfigError("paths: n out of range");
  if (!(args.t > 0.0) || !(args.eps > 0.0))
    throw ConfigError("paths: t and eps must be > 0");
  fs::create_directories(ctx.outdir);
  std::ostringstream os;
  for (std::uint64_t i = 0; i < args.n; ++i)
    levy::dump_csv(os, levy::sample_path(args.t, args.eps, ctx.cfg.model.m_p,
                                         args.seed, i));
  write_file(fs::path(ctx.outdir) / "paths.csv", os.str());
  json ov;
  ov["n"] = args.n;
  ov["seed"] = args.seed;
  ov["t"] = args.t;
  ov["eps"] = args.eps;
  write_manifest(ctx, "paths", {"paths.csv"}, kExitOk, ov);
  return kExitOk;
}

int run_action_id(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  fs::create_directories(ctx.outdir);
  auto g = grid_for(cfg);
  std::vector<Cutoff> fin;
  for (const auto& c : cfg.cutoff_ladder())
    if (c.is_finite() && c.radius() > 0.0) fin.push_back(c);
  if (fin.empty())
    throw ConfigError("action-id: needs at least one finite cutoff");

  action::EvalOptions opts;
  opts.cutoffs = fin;
  opts.eren = cfg.eren;
  opts.want_defining = true;
  action::PathEvaluator ev(cfg.model, g, opts);

  const int nc = static_cast<int>(fin.size());
  std::vector<complexd> vals;
  mc::RunParams run = run_params(ctx, cfg.times[0]);
  mc::run_paths(
      run, cfg.model.m_p, nc,
      [&](std::uint64_t, const levy::LevyPath& path, complexd* row) {
        const auto F = ev.evaluate(path);
        for (int ci = 0; ci < nc; ++ci)
          row[ci] = complexd(std::abs(F[ci].u_defining - F[ci].u.real()),
                             std::abs(F[ci].u.imag()));
      },
      vals);
  std::vector<double> re, im;
  re.reserve(vals.size());
  im.reserve(vals.size());
  for (const auto& v : vals) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  std::vector<double> re2 = re, im2 = im;
  const double med_re = sorted_quantile(re, 0.5);
  const double p99_re = sorted_quantile(re2, 0.99);
  const double med_im = sorted_quantile(im, 0.5);
  const double p99_im = sorted_quantile(im2, 0.99);
  const bool pass = med_re <= cfg.tol_id / 10.0 && p99_re <= cfg.tol_id &&
                    med_im <= cfg.tol_id / 10.0 && p99_im <= cfg.tol_id;

  json out;
  out["config_hash"] = cfg.hash();
  out["n_paths"] = cfg.n_paths;
  out["cutoffs"] = json::array();
  for (const auto& c : fin) out["cutoffs"].push_back(lambda_json(c));
  out["median_defining_vs_ito"] = med_re;
  out["p99_defining_vs_ito"] = p99_re;
  out["median_im_u"] = med_im;
  out["p99_im_u"] = p99_im;
  out["budget_median"] = cfg.tol_id / 10.0;
  out["budget_p99"] = cfg.tol_id;
  out["pass"] = pass;
  write_file(fs::path(ctx.outdir) / "action_id.json", out.dump(2) + "\n");
  const int status = pass ? kExitOk : kExitBudget;
  write_manifest(ctx, "action-id", {"action_id.json"}, status);
  return status;
}

int rerun_manifest(const std::string& manifest_path, const std::string& outdir,
                   int threads) {
  std::ifstream f(manifest_path);
  if (!f) throw ConfigError("cannot read manifest: " + manifest_path);
  json m;
  try {
    f >> m;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad manifest: ") + e.what());
  }
  if (!m.contains("subcommand") || !m.contains("config"))
    throw ConfigError("manifest missing subcommand or config");
  RunContext ctx;
  ctx.cfg = config::parse_config(m["config"].get<std::string>());
  if (m.contains("experiment"))
    ctx.cfg.experiment = m["experiment"].get<std::string>();
  ctx.outdir = outdir;
  ctx.threads = threads;
  const std::string sub = m["subcommand"].get<std::string>();
  if (sub == "validate") return run_validate(ctx);
  if (sub == "semigroup") return run_semigroup(ctx);
  if (sub == "sweep") return run_sweep(ctx);
  if (sub == "oracle") return run_oracle(ctx);
  if (sub == "compare") return run_compare(ctx);
  if (sub == "action-id") return run_action_id(ctx);
  if (sub == "paths") {
    PathDumpArgs a;
    if (m.contains("overrides")) {
      const auto& o = m["overrides"];
      a.n = o.value("n", a.n);
      a.seed = o.value("seed", a.seed);
      a.t = o.value("t", a.t);
      a.eps = o.value("eps", a.eps);
    }
    return run_paths(ctx, a);
  }
  throw ConfigError("manifest names unknown subcommand: " + sub);
}

}  // namespace rnm::runner
