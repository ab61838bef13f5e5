#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <tuple>

#include "pbf/carrier.hpp"
#include "pbf/green_ansatz.hpp"
#include "pbf/model.hpp"
#include "pbf/rep_file.hpp"

namespace pbf::cli {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  return f;
}

void print_dims(std::ostream& out, const std::map<Grade, int>& dims, int order) {
  out << dims_table(dims);
  if (const auto v = compare_pattern(dims, order))
    out << "pattern: MISMATCH at " << to_string(v->grade) << ": expected " << v->expected << ", found " << v->actual
        << '\n';
  else
    out << "pattern: ok (edges 1-dim, interior 2-dim)\n";
}

Representation build_representation(const RunConfig& c) {
  const auto ops = build_para_ops(c.p, c.M, c.build_options());
  auto basis = extract_carrier(ops, c.m_keep(), c.rank_tol);
  auto projected = project_ops(ops, basis);
  return {std::move(basis), std::move(projected)};
}

Representation require_rep(const RunConfig& c) {
  const auto path = c.rep_path();
  if (!std::filesystem::exists(path))
    throw Error("representation file not found: " + path.string() + " (run build-rep first)");
  return load_rep(path);
}

}  // namespace

int cmd_build_rep(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto rep = build_representation(c);
  const auto path = c.rep_path();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  save_rep(rep.basis, rep.projected, path);
  ctx.out << "wrote " << path.string() << " (p=" << c.p << ", M=" << c.M << ", M_keep=" << c.m_keep()
          << ", carrier dim " << rep.basis.size() << ")\n";
  print_dims(ctx.out, rep.basis.dims(), c.p);
  return compare_pattern(rep.basis) ? kExitCheck : kExitOk;
}

int cmd_dims(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto rep = std::filesystem::exists(c.rep_path()) ? load_rep(c.rep_path()) : build_representation(c);
  print_dims(ctx.out, rep.basis.dims(), rep.basis.order());
  return compare_pattern(rep.basis) ? kExitCheck : kExitOk;
}

int cmd_check(const CommandContext& ctx) {
  const auto& c = ctx.config;
  if (c.M < 3) throw ConfigError("config: check needs M >= 3 for the trilinear relations");
  const double tol = c.relation_tol;
  const auto ops = build_para_ops(c.p, c.M, c.build_options());

  const auto stats = check_statistics(ops, tol);
  const auto tri = check_trilinear(ops, tol);
  const auto vac = check_vacuum(ops);
  const auto ladder = check_ladder(ops);
  const auto number = check_number_identities(ops);

  nlohmann::ordered_json report;
  report["p"] = c.p;
  report["M"] = c.M;
  report["tolerance"] = tol;
  bool ok = true;

  ctx.out << "relation checks for p=" << c.p << ", M=" << c.M << " at tolerance " << num(tol) << '\n';
  auto summarize = [&](const RelationReport& r, const char* section) {
    std::map<std::string, std::pair<double, bool>> per_family;
    auto& arr = report[section] = nlohmann::ordered_json::array();
    for (const auto& res : r.results) {
      auto& [worst, pass] = per_family.try_emplace(res.family, 0.0, true).first->second;
      worst = std::max(worst, res.residual);
      pass = pass && res.pass;
      arr.push_back({{"family", res.family}, {"signs", res.signs}, {"residual", res.residual}, {"pass", res.pass}});
    }
    for (const auto& [family, wp] : per_family)
      ctx.out << "  " << family << ": max residual " << num(wp.first) << (wp.second ? "  PASS" : "  FAIL") << '\n';
    for (const auto& f : r.failures())
      ctx.out << "  FAILED " << f.family << ' ' << f.signs << " residual " << num(f.residual) << '\n';
    ok = ok && r.all_pass();
  };
  summarize(stats, "statistics");
  summarize(tri, "trilinear");

  const bool vac_ok = vac.pass(tol);
  ctx.out << "  vacuum: <0|b-b+|0> = " << num(vac.b_minus_b_plus.real()) << ", <0|f-f+|0> = "
          << num(vac.f_minus_f_plus.real()) << ", max deviation " << num(vac.max_deviation())
          << (vac_ok ? "  PASS" : "  FAIL") << '\n';
  report["vacuum"] = {{"b_minus_norm", vac.b_minus_norm},
                      {"f_minus_norm", vac.f_minus_norm},
                      {"b_minus_b_plus", vac.b_minus_b_plus.real()},
                      {"f_minus_f_plus", vac.f_minus_f_plus.real()},
                      {"b_minus_f_plus_norm", vac.b_minus_f_plus_norm},
                      {"f_minus_b_plus_norm", vac.f_minus_b_plus_norm},
                      {"pass", vac_ok}};

  const bool ladder_ok = ladder.pass(tol);
  ctx.out << "  ladder recursions: max residual " << num(ladder.max_residual()) << ", ||(f+)^(p+1)|0>|| = "
          << num(ladder.fermion_top_norm) << (ladder_ok ? "  PASS" : "  FAIL") << '\n';
  report["ladder"] = {{"max_residual", ladder.max_residual()}, {"fermion_top_norm", ladder.fermion_top_norm},
                      {"pass", ladder_ok}};

  const bool number_ok = number.pass(tol);
  ctx.out << "  number identities: N_b " << num(number.boson_residual) << ", N_f " << num(number.fermion_residual)
          << (number_ok ? "  PASS" : "  FAIL") << '\n';
  report["number_identities"] = {
      {"boson_residual", number.boson_residual}, {"fermion_residual", number.fermion_residual}, {"pass", number_ok}};

  ok = ok && vac_ok && ladder_ok && number_ok;
  report["pass"] = ok;
  ctx.out << (ok ? "all checks passed\n" : "CHECK FAILED\n");

  auto f = open_output(c.out / "check.json");
  f << report.dump(2) << '\n';
  return ok ? kExitOk : kExitCheck;
}

namespace {

HamiltonianMatrix build_model(const CommandContext& ctx, const Representation& rep) {
  auto h = build_hamiltonian(ctx.config.model_params(), rep.projected);
  if (!h.hermitian)
    ctx.out << "warning: Hamiltonian is not Hermitian (lambda4 != conj(lambda1) or lambda3 != conj(lambda2))\n";
  return h;
}

}  // namespace

int cmd_spectrum(const CommandContext& ctx) {
  const auto rep = require_rep(ctx.config);
  const auto h = build_model(ctx, rep);
  const auto spec = spectrum(h);

  const auto path = ctx.config.out / "spectrum.csv";
  auto f = open_output(path);
  write_spectrum_csv(f, spec);

  std::vector<std::tuple<double, int, Eigen::Index>> levels;
  std::size_t skipped = 0;
  for (const auto& b : spec.blocks) {
    if (b.boundary) {
      ++skipped;
      continue;
    }
    for (Eigen::Index k = 0; k < b.eigenvalues.size(); ++k) levels.emplace_back(b.eigenvalues(k), b.charge, k);
  }
  std::sort(levels.begin(), levels.end());
  ctx.out << "wrote " << path.string() << " (" << skipped << " truncation-affected blocks omitted)\n";
  ctx.out << "lowest levels (block, index, energy):\n";
  for (std::size_t k = 0; k < std::min<std::size_t>(10, levels.size()); ++k)
    ctx.out << "  " << std::get<1>(levels[k]) << ' ' << std::get<2>(levels[k]) << ' ' << num(std::get<0>(levels[k]))
            << '\n';
  return kExitOk;
}

int cmd_evolve(const CommandContext& ctx) {
  const auto& c = ctx.config;
  const auto rep = require_rep(c);
  const auto h = build_model(ctx, rep);
  const auto initial = carrier_state(h, c.initial);
  const auto times = time_grid(c.t_max, c.steps);
  EvolveOptions options;
  options.allow_nonhermitian = ctx.override_nonhermitian;
  const auto traj = evolve(h, initial, times, options);

  const auto path = c.out / "trajectory.csv";
  auto f = open_output(path);
  write_trajectory_csv(f, traj);

  ctx.out << "wrote " << path.string() << " (" << traj.times.size() << " time points)\n";
  ctx.out << "populations at t=" << num(traj.times.back()) << ":\n";
  for (const auto& [g, series] : traj.populations)
    if (series.back() > 1e-12) ctx.out << "  P_" << g.m << '_' << g.n << " = " << num(series.back()) << '\n';
  ctx.out << "  <N_b> = " << num(traj.n_b.back()) << ", <N_f> = " << num(traj.n_f.back()) << '\n';
  return kExitOk;
}

int cmd_transitions(const CommandContext& ctx) {
  const auto rep = require_rep(ctx.config);
  const auto h = build_model(ctx, rep);
  const auto table = transition_table(h);

  const auto path = ctx.config.out / "transitions.csv";
  auto f = open_output(path);
  write_transitions_csv(f, table);

  ctx.out << "wrote " << path.string() << " (" << table.rows.size() << " couplings, " << table.violations.size()
          << " selection-rule violations)\n";
  for (const auto& v : table.violations)
    ctx.out << "  VIOLATION (" << v.from.m << "," << v.from.n << "," << v.from.i << ") -> (" << v.to.m << ","
            << v.to.n << "," << v.to.i << ") |amp| " << num(std::abs(v.amplitude)) << '\n';
  return table.violations.empty() ? kExitOk : kExitCheck;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pbf: Fock-like representations of the relative parabose algebra and generalized "
               "Jaynes-Cummings models"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool override_nonhermitian = false;
  app.add_option("--config", config_path, "key=value run configuration file");
  app.add_option("--out", out_dir, "output directory (overrides the config's out=)");
  app.add_flag("--override-nonhermitian", override_nonhermitian, "allow evolution under a non-Hermitian Hamiltonian");

  using Command = int (*)(const CommandContext&);
  const std::vector<std::pair<std::string, std::pair<std::string, Command>>> commands{
      {"build-rep", {"build the carrier representation and write the rep file", cmd_build_rep}},
      {"check", {"verify statistics, trilinear relations, vacuum and ladder identities", cmd_check}},
      {"dims", {"print the V(m,n) dimension table and pattern verdict", cmd_dims}},
      {"spectrum", {"block-diagonalize the Hamiltonian and write spectrum.csv", cmd_spectrum}},
      {"evolve", {"evolve the initial state and write trajectory.csv", cmd_evolve}},
      {"transitions", {"tabulate interaction couplings and write transitions.csv", cmd_transitions}},
  };
  std::map<CLI::App*, Command> dispatch;
  for (const auto& [name, desc_fn] : commands) {
    auto* sub = app.add_subcommand(name, desc_fn.first);
    sub->fallthrough();
    dispatch[sub] = desc_fn.second;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out_dir.empty()) config.out = out_dir;
    validate(config);
    for (const auto& [sub, fn] : dispatch)
      if (sub->parsed()) return fn(CommandContext{std::move(config), override_nonhermitian, out});
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "validation failure: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ResourceLimitError& e) {
    err << "resource limit: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace pbf::cli
