#include "eafe/quadrature.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>

namespace eafe {

namespace {

GaussRule compute_gauss_legendre(int n) {
  // Newton iteration on Legendre polynomials, nodes on [-1,1] then mapped
  // to [0,1]. Standard gauleg construction.
  GaussRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    Real z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    Real pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      Real p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const Real p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const Real z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    const Real w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.points[i] = 0.5 * (1.0 - z);
    rule.points[n - 1 - i] = 0.5 * (1.0 + z);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

void append_point(std::vector<std::vector<Real>>& pts, std::vector<Real>& wts,
                  const std::vector<Real>& bary, Real w) {
  pts.push_back(bary);
  wts.push_back(w);
}

// Enumerate nonnegative integer (dim+1)-tuples k with |k| = total.
void enumerate_multi(int ncomp, int total, std::vector<int>& k, int pos,
                     const std::function<void(const std::vector<int>&)>& emit) {
  if (pos == ncomp - 1) {
    k[pos] = total;
    emit(k);
    return;
  }
  for (int v = 0; v <= total; ++v) {
    k[pos] = v;
    enumerate_multi(ncomp, total - v, k, pos + 1, emit);
  }
}

// Grundmann-Moller rule of index s on the dim-simplex, degree 2s+1.
// Weights are normalized so they sum to 1 (reference volume divided out).
SimplexRule grundmann_moller(int dim, int s) {
  const int n = dim;
  const int d = 2 * s + 1;
  std::vector<std::vector<Real>> pts;
  std::vector<Real> wts;

  auto factorial = [](int m) {
    Real r = 1.0;
    for (int i = 2; i <= m; ++i) r *= i;
    return r;
  };

  for (int i = 0; i <= s; ++i) {
    const Real sign = (i % 2 == 0) ? 1.0 : -1.0;
    const Real denom = std::pow(2.0, 2 * s) * factorial(i) * factorial(d + n - i);
    const Real w = sign * std::pow(Real(d + n - 2 * i), d) / denom;
    std::vector<int> k(n + 1, 0);
    enumerate_multi(n + 1, s - i, k, 0, [&](const std::vector<int>& kk) {
      std::vector<Real> bary(n + 1);
      for (int c = 0; c <= n; ++c)
        bary[c] = Real(2 * kk[c] + 1) / Real(d + n - 2 * i);
      append_point(pts, wts, bary, w);
    });
  }

  // The raw weights integrate over the unit simplex (volume 1/n!).
  Real vol = 1.0;
  for (int i = 2; i <= n; ++i) vol /= i;
  SimplexRule rule;
  rule.dim = dim;
  rule.degree = d;
  rule.barycentric.resize(static_cast<Index>(pts.size()), n + 1);
  rule.weights.resize(pts.size());
  for (std::size_t q = 0; q < pts.size(); ++q) {
    for (int c = 0; c <= n; ++c) rule.barycentric(static_cast<Index>(q), c) = pts[q][c];
    rule.weights[q] = wts[q] / vol;
  }
  return rule;
}

SimplexRule centroid_rule(int dim) {
  SimplexRule rule;
  rule.dim = dim;
  rule.degree = 1;
  rule.barycentric.resize(1, dim + 1);
  rule.barycentric.setConstant(1.0 / (dim + 1));
  rule.weights = {1.0};
  return rule;
}

SimplexRule degree2_rule(int dim) {
  SimplexRule rule;
  rule.dim = dim;
  rule.degree = 2;
  if (dim == 2) {
    // Edge midpoints, weight 1/3 each.
    rule.barycentric.resize(3, 3);
    rule.barycentric << 0.5, 0.5, 0.0,
                        0.5, 0.0, 0.5,
                        0.0, 0.5, 0.5;
    rule.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  } else {
    // Symmetric 4-point rule.
    const Real a = 0.5854101966249685;  // (5 + 3 sqrt 5) / 20
    const Real b = 0.1381966011250105;  // (5 - sqrt 5) / 20
    rule.barycentric.resize(4, 4);
    rule.barycentric << a, b, b, b,
                        b, a, b, b,
                        b, b, a, b,
                        b, b, b, a;
    rule.weights = {0.25, 0.25, 0.25, 0.25};
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

const SimplexRule& simplex_rule(int dim, int degree) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("simplex_rule: dim must be 2 or 3");
  if (degree < 1) degree = 1;
  static std::map<std::pair<int, int>, SimplexRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(dim, degree);
  auto it = cache.find(key);
  if (it == cache.end()) {
    SimplexRule rule;
    if (degree <= 1) {
      rule = centroid_rule(dim);
    } else if (degree == 2) {
      rule = degree2_rule(dim);
    } else {
      const int s = (degree - 1 + 1) / 2;  // smallest s with 2s+1 >= degree
      rule = grundmann_moller(dim, s);
    }
    it = cache.emplace(key, std::move(rule)).first;
  }
  return it->second;
}

}  // namespace eafe
