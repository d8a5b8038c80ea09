#include "fscap/app/methods.hpp"

#include <charconv>
#include <cmath>
#include <algorithm>
#include <exception>
#include <vector>

#include "fscap/dual_mdp.hpp"
#include "fscap/error.hpp"
#include "fscap/graph_bounds.hpp"

namespace fscap::app {

namespace {

std::string graph_token(const std::string& token) {
  if (token == "appendixA" || token == "appendixC") return token;
  if (token.rfind("markov", 0) == 0 && token.size() > 6) {
    for (std::size_t i = 6; i < token.size(); ++i)
      if (token[i] < '0' || token[i] > '9') return {};
    return "markov:k=" + token.substr(6);
  }
  return {};
}

bool delay_token(const std::string& token, int& delay) {
  if (token.size() < 2 || token[0] != 'd') return false;
  const auto [ptr, ec] = std::from_chars(token.data() + 1, token.data() + token.size(), delay);
  return ec == std::errc() && ptr == token.data() + token.size() && delay >= 1;
}

std::string require_family(const std::string& family, std::initializer_list<const char*> allowed, const std::string& method) {
  for (const char* a : allowed)
    if (family == a) return family;
  throw InvalidArgument("method '" + method + "' does not apply to channel '" + family + "'");
}

MethodResult from_upper(const BoundReport& r) {
  MethodResult m;
  m.value = r.value;
  m.residual = r.stationarity_residual;
  m.iterations = r.iterations;
  m.status = r.converged ? "ok" : "unconverged";
  return m;
}

}  // namespace

MethodSpec parse_method(const std::string& name, const std::string& default_graph, int default_delay) {
  MethodSpec m;
  m.name = name;
  m.delay = default_delay;
  if (name == "dec-fb" || name == "analytic-thm") {
    m.kind = name;
    return m;
  }
  for (const char* kind : {"qgraph-ub", "dual-ub", "bcjr-lb"}) {
    const std::string k = kind;
    if (name.rfind(k, 0) != 0) continue;
    std::string rest = name.substr(k.size());
    if (!rest.empty() && rest[0] != '-') break;
    m.kind = k;
    m.graph = graph_token(default_graph).empty() ? default_graph : graph_token(default_graph);
    // Tokens after the kind: an optional graph, then an optional delay.
    std::vector<std::string> tokens;
    for (std::size_t pos = 0; pos < rest.size();) {
      const std::size_t next = std::min(rest.find('-', pos + 1), rest.size());
      tokens.push_back(rest.substr(pos + 1, next - pos - 1));
      pos = next;
    }
    std::size_t i = 0;
    if (i < tokens.size() && !graph_token(tokens[i]).empty()) m.graph = graph_token(tokens[i++]);
    if (i < tokens.size() && delay_token(tokens[i], m.delay)) ++i;
    if (i < tokens.size()) throw InvalidArgument("unknown part '" + tokens[i] + "' in method '" + name + "'");
    if (m.graph.empty()) throw InvalidArgument("method '" + name + "' needs a Q-graph (none given and no default)");
    return m;
  }
  throw InvalidArgument("unknown method '" + name + "'");
}

std::string channel_name(const std::string& family, double p) {
  if (family == "trapdoor") return family;
  if (family != "bsc-rll" && family != "dec") throw InvalidArgument("unknown channel family '" + family + "'");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, p);
  return family + ":p=" + std::string(buf, res.ptr);
}

MethodResult evaluate_method(const std::string& family, double p, const MethodSpec& method, const MethodOptions& opts) {
  try {
    MethodResult out;
    if (method.kind == "dec-fb") {
      require_family(family, {"dec"}, method.name);
      out.value = dec_feedback_capacity(p).value;
      return out;
    }
    if (method.kind == "analytic-thm") {
      if (family == "bsc-rll") {
        const auto b = bsc_bound(p);
        const auto c = bsc_certificate(p, b.a, b.b, b.c, b.d);
        out.value = b.value;
        out.residual = verify_certificate(c.channel.channel, c.graph, c.test, c.certificate, 1.0).max_violation;
      } else if (family == "dec") {
        if (std::abs(p - 0.5) > 1e-12) throw InvalidArgument("the DEC theorem bound is stated for p=0.5 only");
        const auto b = dec_bound();
        const auto c = dec_certificate(b.a);
        out.value = b.value;
        out.residual = verify_certificate(c.channel.channel, c.graph, c.test, c.certificate, 1.0).max_violation;
      } else {
        require_family(family, {"trapdoor"}, method.name);
        const auto c = trapdoor_certificate();
        out.value = c.certificate.rho;
        out.residual = verify_certificate(c.channel.channel, c.graph, c.test, c.certificate, 1.0).max_violation;
      }
      return out;
    }

    const auto base = channel_from_name(channel_name(family, p));
    const auto tc = transform(base, method.delay);
    const auto g = qgraph_from_name(method.graph, base.output_count);
    UpperBoundOptions uo;
    uo.seed = opts.seed;
    uo.random_starts = opts.random_starts;
    const auto ub = upper_bound(tc, g, uo);
    if (method.kind == "qgraph-ub") return from_upper(ub);

    if (method.kind == "dual-ub") {
      const auto test = make_test_distribution(g.node_count, g.output_count, ub.output_given_node);
      const auto rvi = relative_value_iteration(tc.channel, g, test);
      out.value = rvi.certificate.rho;
      out.residual = rvi.span;
      out.iterations = rvi.iterations;
      return out;
    }

    // bcjr-lb
    const auto search = find_bcjr_policy(tc.channel, g, ub.policy);
    const auto lb = lower_bound(tc, g, search.policy);
    out.value = lb.value;
    out.residual = lb.bcjr_residual;
    out.iterations = search.iterations;
    return out;
  } catch (const NotConverged& e) {
    MethodResult r;
    r.value = std::nan("");
    r.residual = e.residual();
    r.status = std::string("error: ") + e.what();
    return r;
  } catch (const std::exception& e) {
    MethodResult r;
    r.value = std::nan("");
    r.residual = std::nan("");
    r.status = std::string("error: ") + e.what();
    return r;
  }
}

}  // namespace fscap::app
