#include <cmath>
#include <limits>
#include <sstream>

#include "fscap/dual_mdp.hpp"
#include "fscap/error.hpp"

namespace fscap {

namespace {

double lg(double v) { return std::log2(v); }

}  // namespace

CertificateBundle trapdoor_certificate() {
  CertificateBundle b;
  b.channel = transform(make_trapdoor(), 2);
  b.graph = markov_qgraph(1, 2);
  b.test = make_test_distribution(2, 2, {2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0});
  auto& c = b.certificate;
  c.rho = lg(1.5);
  // Pairs z = s*2 + q with s in {(0,0),(0,1),(1,0),(1,1)}.
  c.h.assign(8, 0.0);
  c.h[0 * 2 + 1] = 1.0;  // ((0,0), second node)
  c.h[3 * 2 + 0] = 1.0;  // ((1,1), first node)
  c.support = finite_support(build_mdp(b.channel.channel, b.graph, b.test));
  c.policy = greedy_policy(b.channel.channel, b.graph, b.test, c.h, c.support);
  return b;
}

GraphEncoder trapdoor_encoder() {
  GraphEncoder e;
  e.channel = transform(make_trapdoor(), 2);
  e.graph = appendix_a_qgraph();
  // P(x=0 | s, q); rows are nodes, columns the extended states (0,0), (0,1), (1,0), (1,1).
  const double zero[4][4] = {
      {2.0 / 3, 1.0 / 3, 1.0 / 3, 0.0},
      {1.0, 2.0 / 3, 0.0, 1.0 / 3},
      {2.0 / 3, 1.0, 1.0 / 3, 0.0},
      {1.0, 2.0 / 3, 2.0 / 3, 1.0 / 3},
  };
  e.policy = InputPolicy{4, 4, 2, std::vector<double>(32, 0.0)};
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t q = 0; q < 4; ++q) {
      auto row = e.policy.row(e.policy.pair(s, q));
      row[0] = zero[q][s];
      row[1] = 1.0 - zero[q][s];
    }
  return e;
}

double bsc_rho(double p, double a, double b, double c, double d) {
  const double pb = 1.0 - p;
  return p * lg(p) + pb * lg(pb) - pb * pb * pb * lg(a) - p * p * pb * lg((1 - b) * (1 - c) * d) -
         p * pb * pb * lg((1 - a) * b * c) - p * p * p * lg(1 - d);
}

BscConstraints bsc_constraints(double p, double a, double b, double c, double d) {
  const double p2 = p * p, p3 = p2 * p;
  const double A = 1 - a, B = 1 - b, C = 1 - c, D = 1 - d;
  BscConstraints k;
  k.first = (4 * p3 - 12 * p2 + 11 * p - 3) * lg(a) + (4 * p3 - 6 * p2 + 2 * p) * lg(B * d) + (4 * p3 - 4 * p2 + p) * lg(C) -
            (4 * p3 - 8 * p2 + 5 * p - 1) * lg(A * c) - (4 * p3 - 10 * p2 + 6 * p - 1) * lg(b) - (4 * p3 - 2 * p2) * lg(D);
  k.second = (4 * p3 - 10 * p2 + 8 * p - 2) * lg(a) + (4 * p3 - 4 * p2 + p) * lg(B * d) + (4 * p3 - 2 * p2 - 2 * p + 1) * lg(C) -
             (4 * p3 - 6 * p2 + 2 * p) * lg(A * c) - (4 * p3 - 8 * p2 + 5 * p - 1) * lg(b) - (4 * p3 - p) * lg(D);
  return k;
}

CertificateBundle bsc_certificate(double p, double a, double b, double c, double d) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("bsc_certificate needs p in (0,1)");
  for (double v : {a, b, c, d})
    if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("bsc_certificate needs a, b, c, d in (0,1)");
  const auto k = bsc_constraints(p, a, b, c, d);
  if (k.first < 0.0 || k.second < 0.0) {
    std::ostringstream msg;
    msg << "parameters violate the " << (k.first < 0.0 ? "first" : "second") << " constraint (log2 ratio "
        << (k.first < 0.0 ? k.first : k.second) << ")";
    throw InvalidArgument(msg.str());
  }

  CertificateBundle bundle;
  bundle.channel = transform(make_bsc_rll({p}), 2);
  bundle.graph = appendix_a_qgraph();
  bundle.test = make_test_distribution(4, 2, {a, 1 - a, b, 1 - b, c, 1 - c, d, 1 - d});

  const double p2 = p * p, p3 = p2 * p;
  const double A = 1 - a, B = 1 - b, C = 1 - c, D = 1 - d;
  const double K = lg(A * b * c * D) - lg(a * B * C * d);
  // Extended states after pruning: (0,0), (0,1), (1,0). Pairs z = s*4 + q.
  std::vector<double> h(12, 0.0);
  const double h1 = p * lg(C) + lg(d) + p * lg(D) + (1 - 2 * p) * lg(c) - 2 * p * lg(A) - p * lg(b) - (2 - 3 * p) * lg(a) + p2 * K;
  const double h2 = lg(d) - lg(b) + p * (lg(b * D) - lg(B * d));
  const double h3 = (2 * p - 1) * lg(a) + lg(d) + p * lg(D) - p * lg(A * b * c) + p2 * K;
  for (int s : {0, 2}) {
    h[s * 4 + 0] = h1;
    h[s * 4 + 1] = h2;
    h[s * 4 + 2] = h3;
    h[s * 4 + 3] = 0.0;
  }
  h[4 + 0] = (6 * p2 - 6 * p + 1) * lg(a) + (2 * p2 - p) * lg(B) + 2 * p2 * lg(C) + (2 * p2 - p + 1) * lg(d) + p * lg(D) -
             (4 * p2 - 2 * p + 1) * lg(A) - (4 * p2 - 3 * p + 1) * lg(b) - (4 * p2 - 2 * p) * lg(c) + 2 * p3 * K;
  h[4 + 1] = (5 * p2 - 4 * p + 1) * lg(a) + p * lg(A * c * d) + p2 * lg(B * C * d * D) - (1 - p) * lg(B) - 3 * p2 * lg(A * b * c) +
             2 * p3 * K;
  h[4 + 2] = (6 * p2 - 5 * p + 1) * lg(a) + (2 * p2 - p) * lg(B) + (2 * p2 + p - 1) * lg(C) + (2 * p2 - p + 1) * lg(d) + p * lg(D) -
             (4 * p2 - p) * lg(A) - (4 * p2 - 3 * p + 1) * lg(b) - (4 * p2 - p) * lg(c) + 2 * p3 * K;
  h[4 + 3] = (5 * p2 - 4 * p + 1) * lg(a) + p2 * lg(B * C * d * D) - (3 * p2 - p) * lg(A * b * c) - (1 - p) * lg(D) + 2 * p3 * K;

  auto& cert = bundle.certificate;
  cert.rho = bsc_rho(p, a, b, c, d);
  cert.h = std::move(h);
  cert.support = finite_support(build_mdp(bundle.channel.channel, bundle.graph, bundle.test));
  cert.policy.assign(12, 0);  // x = 0 everywhere: forced after a one, optimal elsewhere under the constraints
  return bundle;
}

double dec_gamma1(double a) { return ((2 - 4 * a) * std::sqrt(a * a + 0.25) + 4 * a * (1 - a) - 1) / (4 * a); }

double dec_gamma2(double a) {
  return ((4 * a * a - 4 * a + 1) * std::sqrt(1 + 4 * a * a) - 8 * a * a * (1 - a) + 1) / (4 - 6 * a);
}

double dec_rho(double a, DecVariant variant) {
  const double root = std::sqrt(1 + 4 * (variant == DecVariant::square ? a * a : a * a * a));
  return 0.25 * lg((2 - 3 * a) / ((1 - 2 * a) * (1 + 8 * a * a * (1 - a) - 3 * a - (1 - 4 * a * (1 - a)) * root)));
}

CertificateBundle dec_certificate(double a, DecVariant variant) {
  if (!(a > 0.0 && a < 0.5)) throw InvalidArgument("dec_certificate needs a in (0, 0.5)");
  const double g1 = dec_gamma1(a), g2 = dec_gamma2(a);
  CertificateBundle bundle;
  bundle.channel = transform(make_dec({0.5}), 2);
  bundle.graph = appendix_c_qgraph();

  // Columns of T(y|q) for y = -1, 0, 1, ?.
  auto outer = [](double minus, double zero, double plus) { return std::vector<double>{minus, zero, plus, 0.5}; };
  const std::vector<double> c1 = outer(0, g1, 0.5 - g1), cg = outer(g2 / 2, 0.5 - g2, g2 / 2), ca = outer(a / 2, 0.5 - a, a / 2),
                            c6 = outer(0.5 - g1, g1, 0);
  std::vector<double> t;
  for (const auto* col : {&c1, &cg, &ca, &ca, &cg, &c6, &cg, &ca}) t.insert(t.end(), col->begin(), col->end());
  bundle.test = make_test_distribution(8, 4, std::move(t));

  // Value function, extended states (0,0), (0,1), (1,0), (1,1); nodes 1-indexed in the groups below.
  std::vector<double> h(32, 0.0);
  auto set = [&](int s, std::initializer_list<int> nodes, double v) {
    for (int q : nodes) h[s * 8 + (q - 1)] = v;
  };
  const double q4 = 0.25;
  const double ia = 1 - 2 * a, i1 = 1 - 2 * g1, i2 = 1 - 2 * g2;
  set(0, {1, 6}, q4 * lg(a * ia * g2 / (4 * i2 * g1 * g1)));
  set(0, {2, 5, 7}, q4 * lg(4 * a * g1 * g1 * g2 / (ia * i2 * i2 * i2)));
  set(0, {3, 4, 8}, q4 * lg(4 * a * g1 * g1 * g2 / (ia * ia * ia * i2)));
  set(1, {1}, q4 * lg(a * ia * ia / (i1 * i1 * i1)));
  set(1, {2, 5, 7}, q4 * lg(a * ia * ia / (g2 * g2 * i1)));
  set(1, {3, 4, 8}, q4 * lg(ia * ia / (a * i1)));
  set(1, {6}, q4 * lg(a * ia * ia / i1));
  set(2, {1}, q4 * lg(a * g2 * ia / i2));
  set(2, {2, 5, 7}, q4 * lg(a * ia / (g2 * i2)));
  set(2, {3, 4, 8}, q4 * lg(g2 * ia / (a * i2)));
  set(2, {6}, q4 * lg(a * g2 * ia / (i1 * i1 * i2)));
  set(3, {1}, lg(ia / (2 * g1)));
  set(3, {2, 5, 7}, 0.5 * lg(ia / i2));
  set(3, {3, 4, 8}, 0.0);
  set(3, {6}, q4 * lg(a * ia * ia / (4 * g1 * g1 * i1)));

  auto& cert = bundle.certificate;
  cert.rho = dec_rho(a, variant);
  cert.support = finite_support(build_mdp(bundle.channel.channel, bundle.graph, bundle.test));
  cert.h.assign(32, std::numeric_limits<double>::quiet_NaN());
  cert.policy.assign(32, -1);
  for (int z : cert.support) {
    cert.h[z] = h[z];
    cert.policy[z] = (z == 3 * 8 + 0) ? 1 : 0;
  }
  return bundle;
}

}  // namespace fscap
