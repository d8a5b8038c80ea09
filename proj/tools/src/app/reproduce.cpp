#include "fscap/app/reproduce.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <map>
#include <sstream>

#include "fscap/app/methods.hpp"
#include "fscap/app/search.hpp"
#include "fscap/dual_mdp.hpp"
#include "fscap/error.hpp"
#include "fscap/graph_bounds.hpp"
#include "fscap/io.hpp"

namespace fscap::app {

namespace {

using io::format_value;

void check(ReproduceReport& r, std::string name, bool ok, std::string detail) {
  r.checks.push_back({std::move(name), ok, std::move(detail)});
}

bool all_passed(const ReproduceReport& r) {
  for (const auto& c : r.checks)
    if (!c.passed) return false;
  return !r.checks.empty();
}

void trapdoor_cfb2(ReproduceReport& r, const ReproduceOptions& opts) {
  const double target = std::log2(1.5);
  r.expected = target;
  r.tolerance = 1e-6;
  const auto enc = trapdoor_encoder();
  const auto lb = lower_bound(enc.channel, enc.graph, enc.policy);
  r.value = lb.value;
  check(r, "encoder lower bound", std::abs(lb.value - target) <= 1e-12, "LB=" + format_value(lb.value) + " BCJR residual " + format_value(lb.bcjr_residual));

  const auto cert = trapdoor_certificate();
  const auto v = verify_certificate(cert.channel.channel, cert.graph, cert.test, cert.certificate, 1e-12);
  check(r, "Bellman certificate", v.passed, "max violation " + format_value(v.max_violation));

  const auto rvi = relative_value_iteration(cert.channel.channel, cert.graph, cert.test);
  check(r, "relative value iteration", std::abs(rvi.certificate.rho - target) <= 1e-6, "rho=" + format_value(rvi.certificate.rho));

  // The certificate already caps the capacity, so a single ascent from the uniform policy suffices here.
  UpperBoundOptions uo;
  uo.seed = opts.seed;
  uo.threads = opts.jobs;
  uo.random_starts = 0;
  const auto ub = upper_bound(enc.channel, appendix_a_qgraph(), uo);
  check(r, "upper bound on the encoder graph", std::abs(ub.value - target) <= 1e-6, "UB=" + format_value(ub.value));
}

void trapdoor_cfb1(ReproduceReport& r, const ReproduceOptions& opts) {
  const double target = std::log2((1.0 + std::sqrt(5.0)) / 2.0);
  r.expected = target;
  r.tolerance = 1e-3;
  SearchOptions so;
  so.max_nodes = 4;
  so.seed = opts.seed;
  so.jobs = opts.jobs;
  so.lower_candidates = 16;
  const auto res = search_qgraphs(transform(make_trapdoor(), 1), so);
  if (!res.best_upper) throw Error("no Q-graph produced an upper bound");
  r.value = res.best_upper->value;
  check(r, "best upper bound over graphs with at most 4 nodes", r.value >= 0.6941 && r.value <= 0.6943,
        "UB=" + format_value(r.value) + " on " + res.best_upper_graph.name + " (" +
            std::to_string(res.scores.size()) + " graphs)");
  const double lb = res.best_lower ? res.best_lower->value : 0.0;
  check(r, "BCJR lower bound", res.best_lower && std::abs(lb - 0.69424) <= 1e-3,
        res.best_lower ? "LB=" + format_value(lb) + " on " + res.best_lower_graph.name : std::string("no BCJR-invariant policy found"));
}

void trapdoor_delay_ub(ReproduceReport& r, const ReproduceOptions& opts, int delay, double reference) {
  r.expected = reference;
  r.tolerance = 2e-3;
  SearchOptions so;
  so.random_starts = 16;
  so.seed = opts.seed;
  so.jobs = opts.jobs;
  const auto res = search_markov(transform(make_trapdoor(), delay), 3, so);
  if (!res.best_upper) throw Error("no Markov graph produced an upper bound");
  r.value = res.best_upper->value;
  std::ostringstream detail;
  for (const auto& s : res.scores) detail << s.graph.name << " UB=" << format_value(s.upper) << "; ";
  check(r, "target", r.value <= reference + r.tolerance, detail.str() + "target <= " + format_value(reference + r.tolerance));
}

std::vector<double> bsc_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(0.05 + 0.4 * i / 19.0);
  return grid;
}

void bsc_curve(ReproduceReport& r, const ReproduceOptions& opts) {
  r.expected = 0.0;
  r.tolerance = 1e-6;
  const auto grid = bsc_grid();
  const auto method = parse_method("qgraph-ub-markov3-d2", "", 2);
  double worst_violation = 0.0, worst_gap = -1.0, lo = 1.0, hi = 0.0;
  std::ostringstream detail;
  bool numeric_ok = true;
  for (double p : grid) {
    const auto b = bsc_bound(p);
    const auto c = bsc_certificate(p, b.a, b.b, b.c, b.d);
    worst_violation = std::max(worst_violation, verify_certificate(c.channel.channel, c.graph, c.test, c.certificate, 1e-9).max_violation);
    lo = std::min(lo, b.value);
    hi = std::max(hi, b.value);
    const auto numeric = evaluate_method("bsc-rll", p, method, {opts.seed, 16});
    if (numeric.status.rfind("error", 0) == 0) {
      numeric_ok = false;
      detail << "p=" << format_value(p) << " " << numeric.status << "; ";
      continue;
    }
    worst_gap = std::max(worst_gap, numeric.value - b.value);
  }
  r.value = worst_gap;
  check(r, "certificates verify at every grid point", worst_violation <= 1e-9, "max violation " + format_value(worst_violation));
  check(r, "analytic curve inside [0, 0.6942]", lo >= 0.0 && hi <= 0.6942, "range [" + format_value(lo) + ", " + format_value(hi) + "]");
  check(r, "markov3 numeric bound at or below the analytic curve", numeric_ok && worst_gap <= 1e-6,
        detail.str() + "max(numeric - analytic) = " + format_value(worst_gap));
}

void dec_curve(ReproduceReport& r, const ReproduceOptions& opts) {
  r.expected = 0.0;
  r.tolerance = 0.0;
  const auto method = parse_method("dual-ub-appendixC-d2", "", 2);
  double worst = -1.0;
  std::ostringstream detail;
  bool ok = true;
  for (int i = 1; i <= 9; ++i) {
    const double p = i / 10.0;
    const auto ub = evaluate_method("dec", p, method, {opts.seed, 16});
    const double fb = dec_feedback_capacity(p).value;
    detail << "p=" << format_value(p) << " UB=" << format_value(ub.value) << " FB=" << format_value(fb) << "; ";
    if (ub.status.rfind("error", 0) == 0) ok = false;
    else worst = std::max(worst, ub.value - fb);
  }
  r.value = worst;
  check(r, "dual upper bound strictly below the feedback capacity", ok && worst < 0.0, detail.str());
}

void dec_feedback_gap(ReproduceReport& r, const ReproduceOptions&) {
  const auto bound = dec_bound();
  const double fb = dec_feedback_capacity(0.5).value;
  r.value = bound.value;
  r.expected = fb;
  r.tolerance = 0.0;
  check(r, "feedback capacity endpoints", dec_feedback_capacity(0.0).value == 1.0 && dec_feedback_capacity(1.0).value == 0.0,
        "C(0)=" + format_value(dec_feedback_capacity(0.0).value) + " C(1)=" + format_value(dec_feedback_capacity(1.0).value));
  check(r, "positive gap at p=0.5", fb - bound.value > 0.0,
        "bound " + format_value(bound.value) + " at a=" + format_value(bound.a) + ", feedback " + format_value(fb) + ", gap " +
            format_value(fb - bound.value));
  const auto c = dec_certificate(bound.a);
  const auto v = verify_certificate(c.channel.channel, c.graph, c.test, c.certificate, 1e-8);
  check(r, "certificate at the minimizer", v.passed, "max violation " + format_value(v.max_violation));
  check(r, "root variant", true, dec_discrepancy(bound.a).verdict);
}

const std::map<std::string, std::function<void(ReproduceReport&, const ReproduceOptions&)>>& registry() {
  static const std::map<std::string, std::function<void(ReproduceReport&, const ReproduceOptions&)>> table = {
      {"trapdoor-cfb2", trapdoor_cfb2},
      {"trapdoor-cfb1", trapdoor_cfb1},
      {"trapdoor-cfb3-ub", [](ReproduceReport& r, const ReproduceOptions& o) { trapdoor_delay_ub(r, o, 3, 0.5782); }},
      {"trapdoor-cfb4-ub", [](ReproduceReport& r, const ReproduceOptions& o) { trapdoor_delay_ub(r, o, 4, 0.5765); }},
      {"bsc-curve", bsc_curve},
      {"dec-curve", dec_curve},
      {"dec-feedback-gap", dec_feedback_gap},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& reproduce_targets() {
  static const std::vector<std::string> names = {"trapdoor-cfb2", "trapdoor-cfb1", "trapdoor-cfb3-ub", "trapdoor-cfb4-ub",
                                                 "bsc-curve",     "dec-curve",     "dec-feedback-gap"};
  return names;
}

ReproduceReport reproduce(const std::string& target, const ReproduceOptions& opts) {
  const auto it = registry().find(target);
  if (it == registry().end()) throw InvalidArgument("unknown target '" + target + "'");
  ReproduceReport r;
  r.target = target;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    it->second(r, opts);
  } catch (const Error& e) {
    check(r, "pipeline", false, e.what());
  }
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  r.passed = all_passed(r);
  return r;
}

std::string to_json(const ReproduceReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return nlohmann::json{{"target", r.target},
                        {"status", r.passed ? "pass" : "fail"},
                        {"value", r.value},
                        {"expected", r.expected},
                        {"tolerance", r.tolerance},
                        {"checks", checks},
                        {"runtime_ms", r.runtime_ms}}
      .dump(2);
}

}  // namespace fscap::app
