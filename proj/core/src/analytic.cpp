#include <algorithm>
#include <array>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "detail.hpp"
#include "fscap/dual_mdp.hpp"
#include "fscap/error.hpp"

namespace fscap {

namespace {

using Point = std::array<double, 4>;

// Plain Nelder-Mead on R^4 (standard reflection/expansion/contraction/shrink coefficients).
Point nelder_mead(const std::function<double(const Point&)>& f, Point start, double step, double tol, int max_iter) {
  std::array<Point, 5> simplex;
  std::array<double, 5> value;
  simplex[0] = start;
  for (int i = 0; i < 4; ++i) {
    simplex[i + 1] = start;
    simplex[i + 1][i] += step;
  }
  for (int i = 0; i < 5; ++i) value[i] = f(simplex[i]);
  auto combine = [](const Point& a, const Point& b, double t) {
    Point r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
  };
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 5> order{0, 1, 2, 3, 4};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return value[i] < value[j]; });
    const int best = order[0], worst = order[4], second = order[3];
    if (value[worst] - value[best] <= tol) break;
    Point centroid{};
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i) centroid[i] += simplex[order[k]][i] / 4.0;
    const Point reflected = combine(centroid, simplex[worst], -1.0);
    const double fr = f(reflected);
    if (fr < value[best]) {
      const Point expanded = combine(centroid, simplex[worst], -2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        value[worst] = fe;
      } else {
        simplex[worst] = reflected;
        value[worst] = fr;
      }
      continue;
    }
    if (fr < value[second]) {
      simplex[worst] = reflected;
      value[worst] = fr;
      continue;
    }
    const Point contracted = fr < value[worst] ? combine(centroid, reflected, 0.5) : combine(centroid, simplex[worst], 0.5);
    const double fc = f(contracted);
    if (fc < std::min(fr, value[worst])) {
      simplex[worst] = contracted;
      value[worst] = fc;
      continue;
    }
    for (int k = 1; k < 5; ++k) {
      simplex[order[k]] = combine(simplex[best], simplex[order[k]], 0.5);
      value[order[k]] = f(simplex[order[k]]);
    }
  }
  int best = 0;
  for (int i = 1; i < 5; ++i)
    if (value[i] < value[best]) best = i;
  return simplex[best];
}

bool inside_box(const Point& x) {
  for (double v : x)
    if (!(v > 0.0 && v < 1.0)) return false;
  return true;
}

bool feasible(double p, const Point& x) {
  return inside_box(x) && bsc_constraints(p, x[0], x[1], x[2], x[3]).ok();
}

}  // namespace

BscBound bsc_bound(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("bsc_bound needs p in (0,1)");
  // Coarse grid on step 0.02 with logs tabulated once.
  std::vector<double> grid, lv, lbar;
  for (int i = 1; i < 50; ++i) {
    grid.push_back(0.02 * i);
    lv.push_back(std::log2(0.02 * i));
    lbar.push_back(std::log2(1.0 - 0.02 * i));
  }
  const double p2 = p * p, p3 = p2 * p, pb = 1 - p;
  const double base = p * std::log2(p) + pb * std::log2(pb);
  const double e1[6] = {4 * p3 - 12 * p2 + 11 * p - 3, 4 * p3 - 6 * p2 + 2 * p, 4 * p3 - 4 * p2 + p,
                        4 * p3 - 8 * p2 + 5 * p - 1, 4 * p3 - 10 * p2 + 6 * p - 1, 4 * p3 - 2 * p2};
  const double e2[6] = {4 * p3 - 10 * p2 + 8 * p - 2, 4 * p3 - 4 * p2 + p, 4 * p3 - 2 * p2 - 2 * p + 1,
                        4 * p3 - 6 * p2 + 2 * p, 4 * p3 - 8 * p2 + 5 * p - 1, 4 * p3 - p};
  double best = std::numeric_limits<double>::infinity();
  Point arg{};
  const std::size_t n = grid.size();
  for (std::size_t ia = 0; ia < n; ++ia)
    for (std::size_t ib = 0; ib < n; ++ib)
      for (std::size_t ic = 0; ic < n; ++ic)
        for (std::size_t id = 0; id < n; ++id) {
          const double la = lv[ia], lA = lbar[ia], lb = lv[ib], lB = lbar[ib], lc = lv[ic], lC = lbar[ic], ld = lv[id], lD = lbar[id];
          const double k1 = e1[0] * la + e1[1] * (lB + ld) + e1[2] * lC - e1[3] * (lA + lc) - e1[4] * lb - e1[5] * lD;
          if (k1 < 0.0) continue;
          const double k2 = e2[0] * la + e2[1] * (lB + ld) + e2[2] * lC - e2[3] * (lA + lc) - e2[4] * lb - e2[5] * lD;
          if (k2 < 0.0) continue;
          const double r = base - pb * pb * pb * la - p2 * pb * (lB + lC + ld) - p * pb * pb * (lA + lb + lc) - p3 * lD;
          if (r < best) {
            best = r;
            arg = {grid[ia], grid[ib], grid[ic], grid[id]};
          }
        }
  if (!std::isfinite(best)) throw Error("no feasible point found for p=" + std::to_string(p));

  auto penalized = [p](const Point& x) {
    if (!inside_box(x)) return 1e6;
    const auto k = bsc_constraints(p, x[0], x[1], x[2], x[3]);
    const double miss = std::min(k.first, 0.0) * std::min(k.first, 0.0) + std::min(k.second, 0.0) * std::min(k.second, 0.0);
    return bsc_rho(p, x[0], x[1], x[2], x[3]) + 1e8 * miss;
  };
  Point x = arg;
  for (double step : {0.01, 0.001, 1e-4}) x = nelder_mead(penalized, x, step, 1e-15, 20000);

  // The penalty leaves the optimum marginally outside; walk back toward the feasible grid point.
  if (!feasible(p, x)) {
    double lo = 0.0, hi = 1.0;  // fraction of the way from x back to arg
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      Point y;
      for (int k = 0; k < 4; ++k) y[k] = x[k] + mid * (arg[k] - x[k]);
      (feasible(p, y) ? hi : lo) = mid;
    }
    for (int k = 0; k < 4; ++k) x[k] += hi * (arg[k] - x[k]);
  }
  BscBound out{best, arg[0], arg[1], arg[2], arg[3]};
  if (feasible(p, x)) {
    const double v = bsc_rho(p, x[0], x[1], x[2], x[3]);
    if (v < best) out = {v, x[0], x[1], x[2], x[3]};
  }
  return out;
}

DecBound dec_bound(DecVariant variant) {
  const auto [a, value] = boost::math::tools::brent_find_minima([variant](double x) { return dec_rho(x, variant); }, 1e-6,
                                                                 0.5 - 1e-6, std::numeric_limits<double>::digits);
  return {value, a};
}

DecFeedback dec_feedback_capacity(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("dec_feedback_capacity needs p in [0,1]");
  if (p == 0.0) return {1.0, 1.0};
  if (p == 1.0) return {0.0, 0.0};
  auto rate = [p](double e) {
    const double h2 = -detail::xlog2x(e) - detail::xlog2x(1 - e);
    return (1 - p) * (e + p * h2) / (p + (1 - p) * e);
  };
  const auto [e, neg] =
      boost::math::tools::brent_find_minima([&](double x) { return -rate(x); }, 0.0, 1.0, std::numeric_limits<double>::digits);
  return {-neg, e};
}

DecDiscrepancy dec_discrepancy(double a, double tol) {
  DecDiscrepancy d;
  d.a = a;
  auto check = [a](DecVariant v, double& rho) {
    const auto b = dec_certificate(a, v);
    rho = b.certificate.rho;
    return verify_certificate(b.channel.channel, b.graph, b.test, b.certificate, 1.0).max_violation;
  };
  d.square_violation = check(DecVariant::square, d.square_rho);
  d.cube_violation = check(DecVariant::cube, d.cube_rho);
  std::ostringstream v;
  v.precision(3);
  v << "sqrt(1+4a^2): " << (d.square_violation <= tol ? "passes" : "fails") << " (max violation " << d.square_violation
    << "); sqrt(1+4a^3): " << (d.cube_violation <= tol ? "passes" : "fails") << " (max violation " << d.cube_violation << ")";
  d.verdict = v.str();
  return d;
}

}  // namespace fscap
