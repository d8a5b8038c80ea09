#include "fscap/app/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>

#include "fscap/app/manifest.hpp"
#include "fscap/app/reproduce.hpp"
#include "fscap/app/search.hpp"
#include "fscap/app/sweep.hpp"
#include "fscap/dual_mdp.hpp"
#include "fscap/error.hpp"
#include "fscap/graph_bounds.hpp"
#include "fscap/io.hpp"

namespace fscap::app {

namespace {

using nlohmann::json;

struct Common {
  std::string channel = "trapdoor";
  int delay = 1;
  std::string qgraph;
  std::uint64_t seed = 1;
  std::size_t starts = 16;
  unsigned jobs = 1;
  std::string out;
};

void add_channel_flags(CLI::App* cmd, Common& c, bool with_graph) {
  cmd->add_option("--channel", c.channel, "channel name (trapdoor, bsc-rll:p=.., dec:p=..) or JSON file")->capture_default_str();
  cmd->add_option("--delay", c.delay, "feedback delay d >= 1")->capture_default_str();
  if (with_graph) cmd->add_option("--qgraph", c.qgraph, "Q-graph name (markov:k=.., appendixA, appendixC) or JSON file")->required();
}

UnifilarFsc load_channel(const std::string& spec) {
  if (std::filesystem::is_regular_file(spec)) return io::channel_from_json(io::read_file(spec));
  return channel_from_name(spec);
}

QGraph load_qgraph(const std::string& spec, std::size_t output_count) {
  if (std::filesystem::is_regular_file(spec)) return io::qgraph_from_json(io::read_file(spec));
  return qgraph_from_name(spec, output_count);
}

void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty()) out << text << '\n';
  else io::write_file(path, text);
}

std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> params;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, end - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("expected key=value, got '" + item + "'");
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data() + eq + 1, item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || eq + 1 == item.size())
      throw InvalidArgument("bad number in '" + item + "'");
    params[item.substr(0, eq)] = v;
    pos = end + 1;
  }
  return params;
}

double need(const std::map<std::string, double>& params, const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) throw InvalidArgument("missing parameter '" + key + "'");
  return it->second;
}

DecVariant parse_variant(const std::string& v) {
  if (v == "square") return DecVariant::square;
  if (v == "cube") return DecVariant::cube;
  throw InvalidArgument("variant must be square or cube");
}

CertificateBundle load_certificate(const std::string& spec) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) != 0) return io::bundle_from_json(io::read_file(spec));
  const std::string rest = spec.substr(prefix.size());
  const auto colon = rest.find(':');
  const std::string kind = rest.substr(0, colon);
  const auto params = colon == std::string::npos ? std::map<std::string, double>{} : parse_params(rest.substr(colon + 1));
  if (kind == "trapdoorA") return trapdoor_certificate();
  if (kind == "bscB") {
    const double p = need(params, "p");
    // Unspecified T parameters default to the minimizer of the bound.
    if (!params.count("a") && !params.count("b") && !params.count("c") && !params.count("d")) {
      const auto b = bsc_bound(p);
      return bsc_certificate(p, b.a, b.b, b.c, b.d);
    }
    return bsc_certificate(p, need(params, "a"), need(params, "b"), need(params, "c"), need(params, "d"));
  }
  if (kind == "decC") {
    const double a = params.count("a") ? params.at("a") : dec_bound().a;
    return dec_certificate(a);
  }
  throw InvalidArgument("unknown builtin certificate '" + kind + "'");
}

int cmd_bound(const std::string& kind, const Common& c, const std::string& policy_path, double tol, std::size_t steps,
              std::ostream& out, std::ostream& err) {
  const auto base = load_channel(c.channel);
  const auto tc = transform(base, c.delay);
  const auto g = load_qgraph(c.qgraph, base.output_count);
  std::optional<InputPolicy> policy;
  if (!policy_path.empty()) policy = io::policy_from_json(io::read_file(policy_path));

  UpperBoundOptions uo;
  uo.seed = c.seed;
  uo.random_starts = c.starts;
  uo.threads = c.jobs;
  uo.init = policy;
  if (kind == "upper") {
    uo.tol = tol;
    const auto r = upper_bound(tc, g, uo);
    if (!r.converged) err << "warning: " << r.diagnostic << '\n';
    emit(out, c.out, io::to_json(r));
    return kExitOk;
  }
  if (!policy) {
    const auto ub = upper_bound(tc, g, uo);
    policy = kind == "lower" ? find_bcjr_policy(tc.channel, g, ub.policy).policy : ub.policy;
  }
  if (kind == "lower") {
    emit(out, c.out, io::to_json(lower_bound(tc, g, *policy, tol)));
    return kExitOk;
  }
  const auto mc = monte_carlo_rate(tc.channel, g, *policy, steps, c.seed);
  BoundReport r;
  r.channel_id = base.name;
  r.delay = c.delay;
  r.qgraph_id = g.name;
  r.kind = BoundKind::monte_carlo;
  r.value = mc.value;
  r.policy = *policy;
  r.iterations = mc.steps;
  r.converged = true;
  r.ci_half_width = 0.5 * (mc.ci_high - mc.ci_low);
  emit(out, c.out, io::to_json(r));
  return kExitOk;
}

int cmd_dual(const Common& c, const std::string& test_spec, double tol, std::ostream& out) {
  const auto base = load_channel(c.channel);
  const auto tc = transform(base, c.delay);
  const auto g = load_qgraph(c.qgraph, base.output_count);
  GraphTestDistribution test;
  if (test_spec == "uniform") {
    test = make_test_distribution(g.node_count, g.output_count,
                                  std::vector<double>(g.node_count * g.output_count, 1.0 / static_cast<double>(g.output_count)));
  } else if (test_spec == "optimized") {
    UpperBoundOptions uo;
    uo.seed = c.seed;
    uo.random_starts = c.starts;
    uo.threads = c.jobs;
    test = make_test_distribution(g.node_count, g.output_count, upper_bound(tc, g, uo).output_given_node);
  } else {
    test = io::test_distribution_from_json(io::read_file(test_spec));
  }
  const auto rvi = relative_value_iteration(tc.channel, g, test, tol);
  const CertificateBundle bundle{tc, g, test, rvi.certificate};
  const auto check = verify_certificate(tc.channel, g, test, rvi.certificate, std::max(tol, 1e-9));
  const json summary = {{"rho", rvi.certificate.rho},
                        {"rho_text", io::format_value(rvi.certificate.rho)},
                        {"iterations", rvi.iterations},
                        {"converged", rvi.converged},
                        {"span", rvi.span},
                        {"verified", check.passed},
                        {"max_violation", check.max_violation}};
  if (c.out.empty()) {
    json full = json::parse(io::to_json(bundle));
    full["summary"] = summary;
    out << full.dump(2) << '\n';
  } else {
    io::write_file(c.out, io::to_json(bundle));
    out << summary.dump(2) << '\n';
  }
  return rvi.converged ? kExitOk : kExitFailure;
}

int cmd_verify(const std::string& spec, double tol, const std::string& out_path, std::ostream& out) {
  const auto b = load_certificate(spec);
  const auto r = verify_certificate(b.channel.channel, b.graph, b.test, b.certificate, tol);
  json j = json::parse(io::to_json(r, b.channel.channel, b.graph));
  j["rho"] = b.certificate.rho;
  j["rho_text"] = io::format_value(b.certificate.rho);
  emit(out, out_path, j.dump(2));
  return r.passed ? kExitOk : kExitFailure;
}

int cmd_analytic(const std::string& which, std::optional<double> p, const std::string& variant, std::ostream& out) {
  json j;
  if (which == "bsc") {
    if (!p) throw InvalidArgument("analytic bsc needs --p");
    const auto b = bsc_bound(*p);
    const auto c = bsc_certificate(*p, b.a, b.b, b.c, b.d);
    const auto v = verify_certificate(c.channel.channel, c.graph, c.test, c.certificate, 1e-9);
    j = {{"p", *p}, {"value", b.value}, {"value_text", io::format_value(b.value)}, {"a", b.a}, {"b", b.b}, {"c", b.c}, {"d", b.d},
         {"verified", v.passed}, {"max_violation", v.max_violation}};
  } else if (which == "dec") {
    const auto var = parse_variant(variant);
    const auto b = dec_bound(var);
    const auto d = dec_discrepancy(b.a);
    j = {{"p", 0.5}, {"variant", variant}, {"value", b.value}, {"value_text", io::format_value(b.value)}, {"a", b.a},
         {"feedback", dec_feedback_capacity(0.5).value}, {"square_violation", d.square_violation}, {"cube_violation", d.cube_violation},
         {"verdict", d.verdict}};
  } else if (which == "dec-fb") {
    if (!p) throw InvalidArgument("analytic dec-fb needs --p");
    const auto f = dec_feedback_capacity(*p);
    j = {{"p", *p}, {"value", f.value}, {"value_text", io::format_value(f.value)}, {"epsilon", f.epsilon}};
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_search(const Common& c, std::size_t max_nodes, int markov, std::size_t lower, std::ostream& out) {
  const auto base = load_channel(c.channel);
  SearchOptions so;
  so.max_nodes = max_nodes;
  so.random_starts = c.starts;
  so.seed = c.seed;
  so.jobs = c.jobs;
  so.lower_candidates = lower;
  const auto tc = transform(base, c.delay);
  const auto res = markov > 0 ? search_markov(tc, markov, so) : search_qgraphs(tc, so);
  json scores = json::array();
  for (const auto& s : res.scores)
    scores.push_back({{"graph", s.graph.name}, {"phi", s.graph.phi}, {"upper", s.upper}, {"status", s.status}});
  json j = {{"channel", base.name}, {"delay", c.delay}, {"graphs", res.scores.size()}, {"scores", scores}};
  if (res.best_upper) {
    j["best_upper"] = {{"value", res.best_upper->value},
                       {"value_text", io::format_value(res.best_upper->value)},
                       {"qgraph", json::parse(io::to_json(res.best_upper_graph))}};
  }
  if (res.best_lower) {
    j["best_lower"] = {{"value", res.best_lower->value},
                       {"value_text", io::format_value(res.best_lower->value)},
                       {"bcjr_residual", res.best_lower->bcjr_residual},
                       {"qgraph", json::parse(io::to_json(res.best_lower_graph))}};
  }
  emit(out, c.out, j.dump(2));
  return res.best_upper ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Capacity bounds for unifilar finite-state channels with delayed feedback", "fscap"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  Common common;
  common.jobs = default_jobs();
  std::string policy_path, test_spec = "optimized", certificate, which, variant = "square", target, config;
  std::string bound_kind;
  double tol = 1e-9, dual_tol = 1e-10;
  std::size_t steps = 1000000, max_nodes = 3, lower = 0;
  int markov = 0;
  std::optional<double> p;

  auto* bound = app.add_subcommand("bound", "upper, lower or Monte Carlo bound on one Q-graph");
  bound->add_option("kind", bound_kind, "upper | lower | mc")->required()->check(CLI::IsMember({"upper", "lower", "mc"}));
  add_channel_flags(bound, common, true);
  bound->add_option("--policy", policy_path, "input policy JSON (lower/mc: evaluated as is; upper: first start)");
  bound->add_option("--tol", tol, "gradient tolerance (upper) or BCJR tolerance (lower)")->capture_default_str();
  bound->add_option("--seed", common.seed)->capture_default_str();
  bound->add_option("--starts", common.starts, "random starts on top of the uniform one")->capture_default_str();
  bound->add_option("--steps", steps, "Monte Carlo steps")->capture_default_str();
  bound->add_option("--jobs", common.jobs, "worker threads (default FSCAP_JOBS)");
  bound->add_option("--out", common.out, "report file (default stdout)");

  auto* dual = app.add_subcommand("dual", "relative value iteration for a test distribution");
  add_channel_flags(dual, common, true);
  dual->add_option("--test", test_spec, "test distribution JSON file, uniform, or optimized (P(y|q) of the Q-graph UB)")
      ->capture_default_str();
  dual->add_option("--tol", dual_tol, "span tolerance")->capture_default_str();
  dual->add_option("--seed", common.seed)->capture_default_str();
  dual->add_option("--starts", common.starts)->capture_default_str();
  dual->add_option("--jobs", common.jobs);
  dual->add_option("--out", common.out, "certificate bundle file");

  double verify_tol = 1e-9;
  auto* verify = app.add_subcommand("verify", "check a Bellman certificate");
  verify->add_option("--certificate", certificate,
                     "bundle file, builtin:trapdoorA, builtin:bscB:p=..[,a=..,b=..,c=..,d=..] or builtin:decC[:a=..]")
      ->required();
  verify->add_option("--tol", verify_tol)->capture_default_str();
  verify->add_option("--out", common.out);

  auto* analytic = app.add_subcommand("analytic", "closed-form bounds");
  analytic->add_option("which", which, "bsc | dec | dec-fb")->required()->check(CLI::IsMember({"bsc", "dec", "dec-fb"}));
  analytic->add_option("--p", p, "channel parameter");
  analytic->add_option("--variant", variant, "DEC root: square or cube")->capture_default_str();

  auto* search = app.add_subcommand("search", "best Q-graph upper bound over an enumerated family");
  add_channel_flags(search, common, false);
  search->add_option("--max-nodes", max_nodes, "enumerate graphs with up to this many nodes")->capture_default_str();
  search->add_option("--markov", markov, "search Markov graphs of order 1..k instead");
  search->add_option("--lower", lower, "run the BCJR search on this many best graphs")->capture_default_str();
  search->add_option("--starts", common.starts)->capture_default_str();
  search->add_option("--seed", common.seed)->capture_default_str();
  search->add_option("--jobs", common.jobs);
  search->add_option("--out", common.out);

  SweepSpec sw;
  std::string grid_text;
  std::vector<std::string> methods;
  std::string manifest_path;
  auto* sweep = app.add_subcommand("sweep", "bound curves over a parameter grid");
  sweep->add_option("--config", config, "JSON config; flags override its values");
  auto* o_channel = sweep->add_option("--channel", sw.channel, "trapdoor, bsc-rll or dec");
  auto* o_delay = sweep->add_option("--delay", sw.delay);
  auto* o_grid = sweep->add_option("--grid", grid_text, "start:stop:step or a comma list");
  auto* o_methods = sweep->add_option("--methods", methods, "method names")->delimiter(',');
  auto* o_qgraph = sweep->add_option("--qgraph", sw.qgraph, "default graph: markov<k>, appendixA, appendixC");
  auto* o_seed = sweep->add_option("--seed", sw.seed);
  auto* o_starts = sweep->add_option("--starts", sw.random_starts);
  auto* o_jobs = sweep->add_option("--jobs", sw.jobs);
  auto* o_out = sweep->add_option("--out", sw.csv_path, "CSV file (default stdout)");
  auto* o_manifest = sweep->add_option("--manifest", manifest_path, "manifest JSON file");

  auto* repro = app.add_subcommand("reproduce", "rerun a headline result and compare it with its reference value");
  repro->add_option("target", target)->required();
  repro->add_option("--seed", common.seed)->capture_default_str();
  repro->add_option("--jobs", common.jobs);
  repro->add_option("--out", common.out);

  auto* export_cmd = app.add_subcommand("transform", "export the delay-d transformed channel as JSON");
  add_channel_flags(export_cmd, common, false);
  export_cmd->add_option("--out", common.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*bound) return cmd_bound(bound_kind, common, policy_path, tol, steps, out, err);
    if (*dual) return cmd_dual(common, test_spec, dual_tol, out);
    if (*verify) return cmd_verify(certificate, verify_tol, common.out, out);
    if (*analytic) return cmd_analytic(which, p, variant, out);
    if (*search) return cmd_search(common, max_nodes, markov, lower, out);
    if (*sweep) {
      SweepSpec spec;
      spec.jobs = default_jobs();
      if (!config.empty()) spec = sweep_from_json(io::read_file(config));
      if (o_channel->count()) spec.channel = sw.channel;
      if (o_delay->count()) spec.delay = sw.delay;
      if (o_grid->count()) spec.grid = parse_grid(grid_text);
      if (o_methods->count()) spec.methods = methods;
      if (o_qgraph->count()) spec.qgraph = sw.qgraph;
      if (o_seed->count()) spec.seed = sw.seed;
      if (o_starts->count()) spec.random_starts = sw.random_starts;
      if (o_jobs->count()) spec.jobs = sw.jobs;
      if (o_out->count()) spec.csv_path = sw.csv_path;
      if (o_manifest->count()) spec.manifest_path = manifest_path;
      const auto result = run_sweep(spec);
      if (spec.csv_path.empty()) out << to_csv(result.rows);
      std::size_t failed = 0;
      for (const auto& r : result.rows) failed += r.status.rfind("error", 0) == 0;
      if (failed) err << failed << " of " << result.rows.size() << " sweep points failed\n";
      return kExitOk;
    }
    if (*repro) {
      const auto report = reproduce(target, {common.seed, common.jobs});
      emit(out, common.out, to_json(report));
      if (!common.out.empty()) out << target << ": " << (report.passed ? "pass" : "fail") << '\n';
      return report.passed ? kExitOk : kExitFailure;
    }
    if (*export_cmd) {
      emit(out, common.out, io::to_json(transform(load_channel(common.channel), common.delay)));
      return kExitOk;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace fscap::app
