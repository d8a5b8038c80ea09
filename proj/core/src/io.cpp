#include "fscap/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <sstream>

#include "fscap/error.hpp"

namespace fscap::io {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("field '") + key + "': " + e.what());
  }
}

std::string pair_key(std::size_t s, std::size_t q) { return "(" + std::to_string(s) + "," + std::to_string(q) + ")"; }

std::size_t parse_pair(const std::string& key, std::size_t state_count, std::size_t node_count) {
  std::size_t s = 0, q = 0;
  char open = 0, comma = 0, close = 0;
  std::istringstream in(key);
  if (!(in >> open >> s >> comma >> q >> close) || open != '(' || comma != ',' || close != ')' || s >= state_count || q >= node_count)
    throw InvalidArgument("bad pair key '" + key + "'");
  return s * node_count + q;
}

json channel_json(const UnifilarFsc& c) {
  json j;
  j["name"] = c.name;
  j["states"] = c.state_count;
  j["inputs"] = c.input_count;
  j["outputs"] = c.output_count;
  json kernel = json::array(), next = json::array();
  for (std::size_t s = 0; s < c.state_count; ++s) {
    json ks = json::array(), ns = json::array();
    for (std::size_t x = 0; x < c.input_count; ++x) {
      json ky = json::array(), ny = json::array();
      for (std::size_t y = 0; y < c.output_count; ++y) {
        ky.push_back(c.prob(s, x, y));
        ny.push_back(c.next(s, x, y));
      }
      ks.push_back(ky);
      ns.push_back(ny);
    }
    kernel.push_back(ks);
    next.push_back(ns);
  }
  j["kernel"] = kernel;
  j["next_state"] = next;
  j["admissible"] = c.admissible;
  j["labels"] = {{"states", c.labels.states}, {"inputs", c.labels.inputs}, {"outputs", c.labels.outputs}};
  return j;
}

UnifilarFsc channel_from(const json& j) {
  UnifilarFsc c;
  c.name = j.value("name", std::string("custom"));
  c.state_count = field<std::size_t>(j, "states");
  c.input_count = field<std::size_t>(j, "inputs");
  c.output_count = field<std::size_t>(j, "outputs");
  const auto kernel = field<std::vector<std::vector<std::vector<double>>>>(j, "kernel");
  const auto next = field<std::vector<std::vector<std::vector<int>>>>(j, "next_state");
  if (kernel.size() != c.state_count || next.size() != c.state_count) throw InvalidArgument("kernel/next_state state dimension mismatch");
  for (std::size_t s = 0; s < c.state_count; ++s) {
    if (kernel[s].size() != c.input_count || next[s].size() != c.input_count) throw InvalidArgument("kernel/next_state input dimension mismatch");
    for (std::size_t x = 0; x < c.input_count; ++x) {
      if (kernel[s][x].size() != c.output_count || next[s][x].size() != c.output_count)
        throw InvalidArgument("kernel/next_state output dimension mismatch");
      c.kernel.insert(c.kernel.end(), kernel[s][x].begin(), kernel[s][x].end());
      c.next_state.insert(c.next_state.end(), next[s][x].begin(), next[s][x].end());
    }
  }
  if (j.contains("admissible")) {
    c.admissible = field<std::vector<std::vector<int>>>(j, "admissible");
  } else {
    c.admissible.assign(c.state_count, {});
    for (auto& a : c.admissible)
      for (std::size_t x = 0; x < c.input_count; ++x) a.push_back(static_cast<int>(x));
  }
  if (j.contains("labels")) {
    const auto& l = j["labels"];
    c.labels.states = l.value("states", std::vector<std::string>{});
    c.labels.inputs = l.value("inputs", std::vector<std::string>{});
    c.labels.outputs = l.value("outputs", std::vector<std::string>{});
  }
  require_valid(c);
  return c;
}

json qgraph_json(const QGraph& g) {
  json phi = json::array();
  for (std::size_t q = 0; q < g.node_count; ++q) {
    json row = json::array();
    for (std::size_t y = 0; y < g.output_count; ++y) row.push_back(g.next(q, y));
    phi.push_back(row);
  }
  return {{"name", g.name}, {"nodes", g.node_count}, {"outputs", g.output_count}, {"phi", phi}};
}

QGraph qgraph_from(const json& j) {
  const auto n = field<std::size_t>(j, "nodes"), m = field<std::size_t>(j, "outputs");
  const auto rows = field<std::vector<std::vector<int>>>(j, "phi");
  if (rows.size() != n) throw InvalidArgument("phi has " + std::to_string(rows.size()) + " rows, expected " + std::to_string(n));
  std::vector<int> phi;
  for (const auto& r : rows) {
    if (r.size() != m) throw InvalidArgument("phi row has the wrong number of outputs");
    phi.insert(phi.end(), r.begin(), r.end());
  }
  return make_qgraph(n, m, std::move(phi), j.value("name", std::string("custom")));
}

json test_json(const GraphTestDistribution& t) {
  json rows = json::array();
  for (std::size_t q = 0; q < t.node_count; ++q) rows.push_back(std::vector<double>(t.row(q).begin(), t.row(q).end()));
  return {{"nodes", t.node_count}, {"outputs", t.output_count}, {"prob", rows}};
}

GraphTestDistribution test_from(const json& j) {
  const auto n = field<std::size_t>(j, "nodes"), m = field<std::size_t>(j, "outputs");
  const auto rows = field<std::vector<std::vector<double>>>(j, "prob");
  if (rows.size() != n) throw InvalidArgument("test distribution row count mismatch");
  std::vector<double> prob;
  for (const auto& r : rows) {
    if (r.size() != m) throw InvalidArgument("test distribution row has the wrong width");
    prob.insert(prob.end(), r.begin(), r.end());
  }
  return make_test_distribution(n, m, std::move(prob));
}

json certificate_json(const BellmanCertificate& c, std::size_t node_count) {
  json h = json::object(), policy = json::object(), support = json::array();
  for (int z : c.support) {
    const std::string key = pair_key(static_cast<std::size_t>(z) / node_count, static_cast<std::size_t>(z) % node_count);
    h[key] = c.h[z];
    if (!c.policy.empty() && c.policy[z] >= 0) policy[key] = c.policy[z];
    support.push_back(key);
  }
  return {{"rho", c.rho}, {"h", h}, {"policy", policy}, {"support", support}};
}

BellmanCertificate certificate_from(const json& j, std::size_t state_count, std::size_t node_count) {
  BellmanCertificate c;
  const std::size_t n = state_count * node_count;
  c.rho = field<double>(j, "rho");
  c.h.assign(n, std::numeric_limits<double>::quiet_NaN());
  c.policy.assign(n, -1);
  const json h = field<json>(j, "h");
  for (const auto& [key, v] : h.items()) c.h[parse_pair(key, state_count, node_count)] = v.get<double>();
  if (j.contains("policy"))
    for (const auto& [key, v] : j["policy"].items()) c.policy[parse_pair(key, state_count, node_count)] = v.get<int>();
  if (j.contains("support")) {
    for (const auto& key : j["support"]) c.support.push_back(static_cast<int>(parse_pair(key.get<std::string>(), state_count, node_count)));
  } else {
    for (std::size_t z = 0; z < n; ++z)
      if (std::isfinite(c.h[z])) c.support.push_back(static_cast<int>(z));
  }
  std::sort(c.support.begin(), c.support.end());
  return c;
}

json policy_json(const InputPolicy& p) {
  json rows = json::array();
  for (std::size_t s = 0; s < p.state_count; ++s) {
    json per_state = json::array();
    for (std::size_t q = 0; q < p.node_count; ++q) {
      const auto r = p.row(p.pair(s, q));
      per_state.push_back(std::vector<double>(r.begin(), r.end()));
    }
    rows.push_back(per_state);
  }
  return {{"states", p.state_count}, {"nodes", p.node_count}, {"inputs", p.input_count}, {"prob", rows}};
}

}  // namespace

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string to_json(const UnifilarFsc& channel) { return channel_json(channel).dump(2); }

UnifilarFsc channel_from_json(const std::string& text) { return channel_from(parse(text)); }

std::string to_json(const TransformedChannel& tc) {
  json j = channel_json(tc.channel);
  j["delay"] = tc.delay;
  j["base"] = tc.base.name;
  json decode = json::array();
  for (std::size_t i = 0; i < tc.states.size(); ++i)
    decode.push_back({{"index", i}, {"state", tc.states[i].base_state}, {"history", tc.states[i].history}, {"code", tc.raw_codes[i]}});
  j["decode"] = decode;
  return j.dump(2);
}

std::string to_json(const QGraph& g) { return qgraph_json(g).dump(2); }

QGraph qgraph_from_json(const std::string& text) { return qgraph_from(parse(text)); }

std::string to_json(const InputPolicy& policy) { return policy_json(policy).dump(2); }

InputPolicy policy_from_json(const std::string& text) {
  const json j = parse(text);
  InputPolicy p;
  p.state_count = field<std::size_t>(j, "states");
  p.node_count = field<std::size_t>(j, "nodes");
  p.input_count = field<std::size_t>(j, "inputs");
  const auto rows = field<std::vector<std::vector<std::vector<double>>>>(j, "prob");
  if (rows.size() != p.state_count) throw InvalidArgument("policy state dimension mismatch");
  for (const auto& per_state : rows) {
    if (per_state.size() != p.node_count) throw InvalidArgument("policy node dimension mismatch");
    for (const auto& r : per_state) {
      if (r.size() != p.input_count) throw InvalidArgument("policy input dimension mismatch");
      p.prob.insert(p.prob.end(), r.begin(), r.end());
    }
  }
  return p;
}

std::string to_json(const GraphTestDistribution& t) { return test_json(t).dump(2); }

GraphTestDistribution test_distribution_from_json(const std::string& text) { return test_from(parse(text)); }

std::string to_json(const BellmanCertificate& cert, std::size_t node_count) { return certificate_json(cert, node_count).dump(2); }

BellmanCertificate certificate_from_json(const std::string& text, std::size_t state_count, std::size_t node_count) {
  return certificate_from(parse(text), state_count, node_count);
}

std::string to_json(const CertificateBundle& b) {
  json j = certificate_json(b.certificate, b.graph.node_count);
  j["channel"] = channel_json(b.channel.base);
  j["delay"] = b.channel.delay;
  j["qgraph"] = qgraph_json(b.graph);
  j["test"] = test_json(b.test);
  return j.dump(2);
}

CertificateBundle bundle_from_json(const std::string& text) {
  const json j = parse(text);
  CertificateBundle b;
  const json& ch = field<json>(j, "channel");
  const UnifilarFsc base = ch.is_string() ? channel_from_name(ch.get<std::string>()) : channel_from(ch);
  b.channel = transform(base, j.value("delay", 1));
  const json& g = field<json>(j, "qgraph");
  b.graph = g.is_string() ? qgraph_from_name(g.get<std::string>(), base.output_count) : qgraph_from(g);
  b.test = test_from(field<json>(j, "test"));
  b.certificate = certificate_from(j, b.channel.channel.state_count, b.graph.node_count);
  return b;
}

std::string to_json(const BoundReport& r) {
  json j;
  j["channel"] = r.channel_id;
  j["delay"] = r.delay;
  j["qgraph"] = r.qgraph_id;
  j["kind"] = to_string(r.kind);
  j["value"] = r.value;
  j["value_text"] = format_value(r.value);
  j["policy"] = policy_json(r.policy);
  j["residuals"] = {{"bcjr", r.bcjr_residual}, {"stationarity", r.stationarity_residual}};
  j["diagnostics"] = {{"iterations", r.iterations},
                      {"converged", r.converged},
                      {"multistart_count", r.multistart_count},
                      {"message", r.diagnostic}};
  if (r.kind == BoundKind::monte_carlo) j["ci_half_width"] = r.ci_half_width;
  return j.dump(2);
}

std::string to_json(const VerificationReport& r, const UnifilarFsc& channel, const QGraph& g) {
  auto name = [&](int z) {
    const std::size_t s = static_cast<std::size_t>(z) / g.node_count, q = static_cast<std::size_t>(z) % g.node_count;
    return pair_key(s, q) + (channel.labels.states.empty() ? "" : " " + channel.labels.states[s]);
  };
  json states = json::array();
  for (const auto& s : r.states)
    states.push_back({{"pair", name(s.pair)},
                      {"lhs", s.lhs},
                      {"rhs", s.rhs},
                      {"violation", s.violation},
                      {"argmax", s.argmax},
                      {"policy_attains", s.policy_attains}});
  json excluded = json::array();
  for (int z : r.excluded_pairs) excluded.push_back(name(z));
  return json{{"passed", r.passed},
              {"max_violation", r.max_violation},
              {"worst_pair", r.worst_pair >= 0 ? name(r.worst_pair) : ""},
              {"policy_optimal", r.policy_optimal},
              {"states", states},
              {"excluded_pairs", excluded},
              {"excluded_actions", r.excluded_actions}}
      .dump(2);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

}  // namespace fscap::io
