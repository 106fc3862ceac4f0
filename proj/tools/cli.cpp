#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "zrlj/current.hpp"
#include "zrlj/errors.hpp"
#include "zrlj/hydrostatic.hpp"
#include "zrlj/io.hpp"
#include "zrlj/ldp.hpp"
#include "zrlj/mc.hpp"

namespace zrlj::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct StatisticalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

io::Meta meta_of(const RunConfig& c, const ModelParams& p, const std::vector<std::int64_t>& Ns) {
  return {{"command", c.command},
          {"gamma", io::format(p.gamma)},
          {"theta", io::format(p.theta)},
          {"kappa", io::format(p.kappa)},
          {"alpha", io::format(p.alpha)},
          {"beta", io::format(p.beta)},
          {"g", p.rate.name()},
          {"normalization", c.normalization},
          {"N", join(Ns)},
          {"seed", std::to_string(c.seed)},
          {"tol", io::format(c.tol)}};
}

std::vector<std::int64_t> Ns_or(const RunConfig& c, std::vector<std::int64_t> fallback) {
  return c.Ns.empty() ? fallback : c.Ns;
}

struct Context {
  ModelParams params;
  ThermoTables thermo;
  JumpKernel kernel;
};

Context make_context(const ModelParams& p) {
  ThermoTables thermo(p.rate);
  p.validate(thermo);
  return Context{p, std::move(thermo), JumpKernel(p.kernel_params())};
}

/// Continuum rho for the regime: closed form where one exists, else the
/// extrapolated limit of the sequence.
std::function<double(double)> limit_rho(const Context& ctx, const Regime& regime, const Tildes& t,
                                        const ProfileSequence* seq) {
  if (regime.tag == RegimeTag::ExplicitRatio || regime.tag == RegimeTag::Neumann) {
    const JumpKernel k = ctx.kernel;
    return [k, regime, t](double u) { return rho_explicit(k, regime, t, u); };
  }
  if (!seq || seq->profiles().size() < 3)
    throw ConfigError("regime " + to_string(regime.tag) + " needs at least three N values for extrapolation");
  return seq->continuum_rho(ctx.params.gamma);
}

// ---- thermo ----

json cmd_thermo(const RunConfig& c) {
  const ThermoTables thermo(c.params.rate);
  const double phi_star = thermo.phi_star();
  double phi_max = c.phi_max;
  if (phi_max < 0.0) phi_max = std::isfinite(phi_star) ? 0.99 * phi_star : 2.0 * thermo.fugacity_Phi(c.params.beta);
  if (!(phi_max < phi_star))
    throw DomainError("thermo: phi grid up to " + io::format(phi_max) + " exceeds phi* = " + io::format(phi_star) +
                      " for g = " + thermo.rate().name());
  if (c.points < 2) throw ConfigError("thermo: --points must be at least 2");
  io::Table phi_table({"phi", "Z", "R", "Phi_of_R", "roundtrip_err"});
  double worst = 0.0;
  for (int i = 0; i < c.points; ++i) {
    const double phi = phi_max * i / (c.points - 1);
    const double R = thermo.mean_R(phi);
    const double back = thermo.fugacity_Phi(R);
    worst = std::max(worst, std::abs(back - phi));
    phi_table.add({phi, thermo.partition_Z(phi), R, back, std::abs(back - phi)});
  }
  const double m_max = std::isfinite(thermo.m_star()) ? 0.99 * thermo.m_star() : 2.0 * c.params.beta;
  io::Table m_table({"m", "Phi", "R_of_Phi"});
  for (int i = 0; i < c.points; ++i) {
    const double m = m_max * i / (c.points - 1);
    const double phi = thermo.fugacity_Phi(m);
    m_table.add({m, phi, thermo.mean_R(phi)});
  }
  const io::Meta meta = meta_of(c, c.params, {});
  io::write_csv(fs::path(c.out) / "thermo_phi.csv", phi_table, meta);
  io::write_csv(fs::path(c.out) / "thermo_m.csv", m_table, meta);
  return {{"phi_star", std::isfinite(phi_star) ? json(phi_star) : json("inf")},
          {"m_star", std::isfinite(thermo.m_star()) ? json(thermo.m_star()) : json("inf")},
          {"phi_max", phi_max},
          {"max_roundtrip_err", worst}};
}

// ---- profile ----

json run_profile(const RunConfig& c, const ModelParams& p, const fs::path& dir) {
  const Context ctx = make_context(p);
  const auto Ns = Ns_or(c, {256, 512, 1024, 2048});
  const io::Meta meta = meta_of(c, p, Ns);
  const ProfileSequence seq = solve_sequence(p, ctx.thermo, ctx.kernel, Ns);
  const Tildes t = seq.tilde();
  const Regime regime = classify_regime(ctx.kernel, p.theta, p.kappa);
  json out;
  out["regime"] = to_string(regime.tag);
  out["kappa_hat"] = regime.kappa_hat;
  out["alpha_tilde"] = t.alpha;
  out["beta_tilde"] = t.beta;

  const bool closed = regime.tag == RegimeTag::ExplicitRatio || regime.tag == RegimeTag::Neumann;
  const std::function<double(double)> rho = limit_rho(ctx, regime, t, closed ? nullptr : &seq);

  json gaps = json::array();
  for (const auto& prof : seq.profiles()) {
    io::Table tab({"x", "x_over_N", "phi", "rho", "m"});
    double gap = 0.0;
    for (std::int64_t x = 1; x < prof.N; ++x) {
      const double u = static_cast<double>(x) / static_cast<double>(prof.N);
      const double phi = prof.at(x);
      tab.add({x, u, phi, phi / t.phi_sum, ctx.thermo.mean_R(phi)});
      if (u >= 0.1 && u <= 0.9) gap = std::max(gap, std::abs(phi / t.phi_sum - rho(u)));
    }
    io::write_csv(dir / ("profile_N" + std::to_string(prof.N) + ".csv"), tab, meta);
    gaps.push_back({{"N", prof.N}, {"sup_gap", gap}, {"solver", prof.info.method}, {"residual", prof.info.residual}});
  }
  out["gaps"] = gaps;

  const ContinuumProfile cont = closed ? closed_form_profile(ctx.kernel, regime, t, ctx.thermo, default_grid(c.grid_points))
                                       : rho_extrapolated(seq, ctx.kernel, regime, ctx.thermo, default_grid(c.grid_points));
  io::Table ct({"u", "rho", "m", "err_estimate"});
  const std::string prov = cont.provenance == Provenance::closed_form ? "closed_form" : "extrapolated";
  for (std::size_t i = 0; i < cont.grid.size(); ++i) ct.add({cont.grid[i], cont.rho[i], cont.m[i], cont.err[i]});
  io::Meta cmeta = meta;
  cmeta.emplace_back("regime", to_string(regime.tag));
  cmeta.emplace_back("kappa_hat", io::format(regime.kappa_hat));
  cmeta.emplace_back("provenance", prov);
  io::write_csv(dir / "continuum.csv", ct, cmeta);

  const double m_mid = ctx.thermo.mean_R(t.phi_sum * rho(0.5));
  const double m_expected = ctx.thermo.mean_R(0.5 * t.phi_sum);
  out["provenance"] = prov;
  out["fallback_points"] = cont.fallback_points;
  out["m_bar_half"] = m_mid;
  out["midpoint_target"] = m_expected;
  out["midpoint_err"] = std::abs(m_mid - m_expected);
  return out;
}

json cmd_profile(const RunConfig& c) {
  if (!c.figure3) return run_profile(c, c.params, c.out);
  struct Case {
    const char* label;
    double gamma, theta;
  };
  const Case cases[] = {{"a_explicit_ratio", 1.5, -1.0},
                        {"b_reaction_diffusion", 1.5, 0.0},
                        {"c_dirichlet", 1.5, 0.25},
                        {"d_robin", 1.5, 0.5},
                        {"e_neumann", 0.5, 1.0}};
  json out;
  for (const Case& k : cases) {
    ModelParams p = c.params;
    p.alpha = 0.2;
    p.beta = 0.8;
    p.rate = RateFunction::figure3();
    p.gamma = k.gamma;
    p.theta = k.theta;
    out[k.label] = run_profile(c, p, fs::path(c.out) / "figure3" / k.label);
  }
  return out;
}

// ---- current ----

json cmd_current(const RunConfig& c) {
  const Context ctx = make_context(c.params);
  const auto Ns = Ns_or(c, {1024, 2048, 4096});
  const io::Meta meta = meta_of(c, c.params, Ns);
  const Regime regime = classify_regime(ctx.kernel, c.params.theta, c.params.kappa);
  if (regime.tag == RegimeTag::ReactionDiffusion && std::abs(c.params.gamma - 1.0) < kRegimeTieTol)
    throw UnsupportedError("current: theta = 0 with gamma = 1 is outside the supported regimes");

  std::vector<FugacityProfile> profiles;
  std::vector<CurrentReport> reports;
  std::vector<double> n, f;
  for (std::int64_t N : Ns) {
    ModelParams p = c.params;
    p.N = N;
    const TrafficSystem s = assemble(p, ctx.thermo, ctx.kernel);
    FugacityProfile prof = solve(s, c.tol);
    const CurrentReport rep = current_report(s, prof, p.gamma, p.theta);
    const auto excl = exclusion_bond_currents(s, prof);
    io::Table tab({"x", "W", "W_exclusion"});
    for (std::int64_t x = 1; x <= N; ++x) tab.add({x, rep.per_x[x - 1], excl[x - 1]});
    io::write_csv(fs::path(c.out) / ("current_N" + std::to_string(N) + ".csv"), tab, meta);
    n.push_back(static_cast<double>(N));
    f.push_back(rep.rescaled);
    profiles.push_back(std::move(prof));
    reports.push_back(rep);
  }

  json out;
  out["regime"] = to_string(regime.tag);
  if (n.size() >= 3) {
    const Extrapolation e = richardson(n, f);
    out["extrapolated"] = e.value;
    out["extrapolation_error"] = e.error;
    out["extrapolation_rate"] = e.rate;
  }
  const ProfileSequence seq(profiles);
  const Tildes t = seq.tilde();
  const bool closed = regime.tag == RegimeTag::ExplicitRatio || regime.tag == RegimeTag::Neumann;
  if (closed || profiles.size() >= 3) {
    const FickLimit fl = fick_limit(ctx.kernel, regime, c.params.theta, c.params.kappa, t,
                                    limit_rho(ctx, regime, t, closed ? nullptr : &seq));
    out["fick_limit"] = fl.value;
    out["fick_spread"] = fl.spread;
    out["h_route"] = fl.h_route;
    if (fl.has_closed_form) {
      out["closed_form"] = fl.closed_form;
      if (out.contains("extrapolated"))
        out["rel_err"] = std::abs(out["extrapolated"].get<double>() - fl.closed_form) / std::abs(fl.closed_form);
    }
  }
  io::Table sweep({"N", "B_N", "current", "rescaled", "max_rel_dev", "extrapolated_limit", "closed_form", "rel_err"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto field = [&](const char* key) { return out.contains(key) ? out[key].get<double>() : nan; };
  for (const auto& rep : reports)
    sweep.add({rep.N, rep.scale_B, rep.current, rep.rescaled, rep.max_rel_dev, field("extrapolated"),
               field("closed_form"), field("rel_err")});
  io::write_csv(fs::path(c.out) / "sweep.csv", sweep, meta);
  return out;
}

// ---- simulate ----

json cmd_simulate(const RunConfig& c) {
  const Context ctx = make_context(c.params);
  ModelParams p = c.params;
  p.N = c.Ns.empty() ? 64 : c.Ns.front();
  const TrafficSystem s = assemble(p, ctx.thermo, ctx.kernel);
  const FugacityProfile exact = solve(s, c.tol);
  SimOptions zo;
  zo.t_burn = c.t_burn;
  zo.t_sample = c.t_sample;
  zo.seed = c.seed;
  zo.batches = c.batches;
  zo.min_events = c.min_events;
  SimOptions eo = zo;
  eo.seed = c.seed + 1;
  const MappingReport r = mapping_check(s, exact, p.rate, zo, eo, c.corrupt_birth);

  auto write = [&](const SimEstimate& est, const std::string& name, bool exclusion) {
    io::Meta meta = meta_of(c, p, {p.N});
    meta.emplace_back("process", exclusion ? "exclusion" : "zero-range");
    meta.emplace_back("sim_seed", std::to_string(est.seed));
    meta.emplace_back("t_burn", io::format(est.t_burn));
    meta.emplace_back("t_sample", io::format(est.t_sample));
    meta.emplace_back("event_count", std::to_string(est.events));
    if (c.corrupt_birth != 1.0) meta.emplace_back("corrupt_birth", io::format(c.corrupt_birth));
    io::Table tab({"x", "mean_xi", "se_xi", "mean_g", "se_g", "exact_phi", "z_score"});
    for (std::size_t j = 0; j < est.mean_xi.size(); ++j) {
      const double scale = exclusion ? r.phi_sum : 1.0;
      const double mg = exclusion ? scale * est.mean_xi[j] : est.mean_g[j];
      const double sg = exclusion ? scale * est.se_xi[j] : est.se_g[j];
      tab.add({static_cast<std::int64_t>(j + 1), est.mean_xi[j], est.se_xi[j], mg, sg, exact.values[j],
               exclusion ? r.z_excl[j] : r.z_zrp[j]});
    }
    io::write_csv(fs::path(c.out) / name, tab, meta);
  };
  write(r.zrp, "estimate_zrp.csv", false);
  write(r.exclusion, "estimate_exclusion.csv", true);
  json out = {{"N", p.N},
              {"events_zrp", r.zrp.events},
              {"events_exclusion", r.exclusion.events},
              {"frac_zrp_within_3se", r.frac_zrp},
              {"frac_exclusion_within_3se", r.frac_excl},
              {"frac_cross_within_3se", r.frac_cross},
              {"pass", r.pass}};
  return out;
}

// ---- ldp ----

struct NamedFn {
  std::string label;
  Profile1D f;
};

std::vector<NamedFn> ldp_basis() {
  return {{"zero", [](double) { return 0.0; }},
          {"one", [](double) { return 1.0; }},
          {"u", [](double u) { return u; }},
          {"sin_pi_u", [](double u) { return std::sin(M_PI * u); }},
          {"u2_minus_half", [](double u) { return u * u - 0.5; }},
          {"cos_3u", [](double u) { return std::cos(3.0 * u); }}};
}

json cmd_ldp(const RunConfig& c) {
  const Context ctx = make_context(c.params);
  require_infinite_radius(ctx.thermo, "ldp");
  const auto Ns = Ns_or(c, {512, 1024, 2048, 4096});
  const ProfileSequence seq = solve_sequence(c.params, ctx.thermo, ctx.kernel, Ns);
  const Tildes t = seq.tilde();
  const Regime regime = classify_regime(ctx.kernel, c.params.theta, c.params.kappa);
  const bool closed = regime.tag == RegimeTag::ExplicitRatio || regime.tag == RegimeTag::Neumann;
  const auto rho = limit_rho(ctx, regime, t, closed ? nullptr : &seq);
  const ThermoTables& th = ctx.thermo;
  const Profile1D m_bar = [&th, rho, t](double u) { return th.mean_R(t.phi_sum * rho(u)); };
  const LdpGrid grid(m_bar, th);

  std::vector<std::string> cols{"label"};
  for (auto N : Ns) cols.push_back("Lambda_N_over_N_" + std::to_string(N));
  cols.push_back("Lambda_limit");
  cols.push_back("rate_value");
  io::Table scan(cols);
  json rows = json::array();
  bool monotone = true;
  for (const auto& [label, G] : ldp_basis()) {
    const QuadValue L = lambda_limit(grid, G);
    std::vector<io::Cell> row{label};
    json gaps = json::array();
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& prof : seq.profiles()) {
      const double v = log_mgf_scaled(prof, th, G);
      row.emplace_back(v);
      const double gap = std::abs(v - L.value);
      gaps.push_back(gap);
      if (label != "zero" && !(gap < prev)) monotone = false;
      prev = gap;
    }
    const double rate =
        rate_function([&](double u, double, double phi) { return th.mean_R(std::exp(G(u)) * phi); }, grid).value;
    row.emplace_back(L.value);
    row.emplace_back(rate);
    scan.add(std::move(row));
    rows.push_back({{"label", label}, {"Lambda_limit", L.value}, {"quad_err", L.error}, {"gaps", gaps}});
  }
  const io::Meta meta = meta_of(c, c.params, Ns);
  io::write_csv(fs::path(c.out) / "ldp_scan.csv", scan, meta);

  // Fenchel-Young on random (pi, G) pairs
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  io::Table fen({"pair", "lambda_star", "pairing", "lambda", "slack"});
  double min_slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < c.fenchel_pairs; ++k) {
    const double g0 = U(rng), g1 = U(rng), g2 = U(rng), g3 = U(rng);
    const double a = 0.3 * U(rng), w = 1.0 + std::floor(3.0 * (U(rng) + 1.0));
    const Profile1D G = [=](double u) { return g0 + u * (g1 + u * (g2 + u * g3)); };
    const NodeProfile pi = [=](double u, double m, double) { return m * (1.0 + a * std::sin(w * M_PI * u)); };
    const double ls = rate_function(pi, grid).value;
    const double pair = grid.integrate([&](double u, double m, double phi) { return pi(u, m, phi) * G(u); }).value;
    const double lam = lambda_limit(grid, G).value;
    const double slack = ls - (pair - lam);
    min_slack = std::min(min_slack, slack);
    fen.add({static_cast<std::int64_t>(k), ls, pair, lam, slack});
  }
  io::write_csv(fs::path(c.out) / "ldp_fenchel.csv", fen, meta);

  const double at_mbar = rate_function([](double, double m, double) { return m; }, grid).value;
  return {{"regime", to_string(regime.tag)},
          {"rows", rows},
          {"monotone_gaps", monotone},
          {"rate_at_m_bar", at_mbar},
          {"fenchel_min_slack", min_slack}};
}

void emit_error(const char* kind, const std::string& msg) {
  std::cerr << json{{"error", kind}, {"message", msg}}.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv) {
  RunConfig c;
  CLI::App app{"Boundary-driven zero-range process with long jumps"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI/TOML file with key = value entries; [command] sections apply per command");
  std::string g_spec = "identity";
  app.add_option("--gamma", c.params.gamma, "kernel exponent in (0,2)")->capture_default_str();
  app.add_option("--theta", c.params.theta, "boundary strength exponent")->capture_default_str();
  app.add_option("--kappa", c.params.kappa, "reservoir coupling")->capture_default_str();
  app.add_option("--alpha", c.params.alpha, "left reservoir density")->capture_default_str();
  app.add_option("--beta", c.params.beta, "right reservoir density")->capture_default_str();
  app.add_option("--N", c.Ns, "system size (repeatable)");
  app.add_option("--g", g_spec, "identity | indicator | figure3 | table:PATH")->capture_default_str();
  app.add_option("--normalization", c.normalization, "normalized | paper-literal")
      ->check(CLI::IsMember({"normalized", "paper-literal"}))
      ->capture_default_str();
  app.add_option("--seed", c.seed)->capture_default_str();
  app.add_option("--out", c.out, "output directory")->capture_default_str();
  app.add_option("--tol", c.tol, "solver tolerance")->capture_default_str();
  app.add_option("--grid", c.grid_points, "continuum grid points")->capture_default_str();

  auto* thermo = app.add_subcommand("thermo", "tabulate Z, R and Phi");
  thermo->add_option("--phi-max", c.phi_max, "upper end of the fugacity grid");
  thermo->add_option("--points", c.points)->capture_default_str();
  auto* profile = app.add_subcommand("profile", "stationary profiles and their continuum limit");
  profile->add_flag("--figure3", c.figure3, "the five regimes with alpha = 0.2, beta = 0.8, g = figure3");
  app.add_subcommand("current", "stationary currents and the fractional Fick law");
  auto* sim = app.add_subcommand("simulate", "Gillespie runs of both processes and the mapping check");
  sim->add_option("--t-sample", c.t_sample)->capture_default_str();
  sim->add_option("--t-burn", c.t_burn, "negative: automatic")->capture_default_str();
  sim->add_option("--min-events", c.min_events)->capture_default_str();
  sim->add_option("--batches", c.batches)->capture_default_str();
  sim->add_option("--corrupt-birth", c.corrupt_birth, "scale zero-range birth rates (negative control)");
  auto* ldp = app.add_subcommand("ldp", "large-deviation functionals");
  ldp->add_option("--pairs", c.fenchel_pairs)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("config", e.what());
    return kConfigError;
  }

  try {
    c.command = app.get_subcommands().front()->get_name();
    c.g_spec = g_spec;
    c.params.rate = RateFunction::from_spec(g_spec);
    c.params.normalization =
        c.normalization == "paper-literal" ? Normalization::paper_literal : Normalization::normalized;
    for (auto N : c.Ns)
      if (N < 3) throw ConfigError("--N must be at least 3");
    fs::create_directories(c.out);
    json result;
    if (c.command == "thermo") result = cmd_thermo(c);
    else if (c.command == "profile") result = cmd_profile(c);
    else if (c.command == "current") result = cmd_current(c);
    else if (c.command == "simulate") result = cmd_simulate(c);
    else result = cmd_ldp(c);
    const json summary = {{"command", c.command}, {"version", io::kVersion}, {"result", result}};
    std::ofstream(fs::path(c.out) / "summary.json") << summary.dump(2) << '\n';
    std::cout << summary.dump(2) << '\n';
    if (c.command == "simulate" && !result["pass"].get<bool>())
      throw StatisticalFailure("mapping check failed: fewer than 95% of sites within 3 standard errors");
    return kOk;
  } catch (const ConfigError& e) {
    emit_error("config", e.what());
    return kConfigError;
  } catch (const DomainError& e) {
    emit_error("domain", e.what());
    return kDomainError;
  } catch (const UnsupportedError& e) {
    emit_error("domain", e.what());
    return kDomainError;
  } catch (const ConvergenceError& e) {
    emit_error("convergence", e.what());
    return kConvergenceError;
  } catch (const StatisticalFailure& e) {
    emit_error("statistical", e.what());
    return kStatisticalFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    emit_error("config", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
}

}  // namespace zrlj::cli
