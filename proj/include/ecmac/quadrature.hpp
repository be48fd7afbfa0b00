#ifndef ECMAC_QUADRATURE_HPP
#define ECMAC_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "ecmac/errors.hpp"

namespace ecmac {

// Nodes and weights for ∫_0^∞ e^{-x} f(x) dx ≈ Σ w_i f(x_i).
struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
  int size() const { return static_cast<int>(x.size()); }
};

namespace detail {

// Implicit-shift QL on a symmetric tridiagonal matrix, tracking only the
// first row of the eigenvector matrix (enough for Golub–Welsch weights).
// d: diagonal (in/out: eigenvalues), e: subdiagonal e[0..n-2],
// q: in e_1 row, out first components of the eigenvectors.
inline void tridiag_eigen_first_row(std::vector<double>& d,
                                    std::vector<double>& e,
                                    std::vector<double>& q) {
  const int n = static_cast<int>(d.size());
  if (n == 1) return;
  e.push_back(0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd)
          break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw numeric_error("quadrature: tridiagonal QL failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          f = q[i + 1];
          q[i + 1] = s * q[i] + c * f;
          q[i] = c * q[i] - s * f;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  e.pop_back();
}

}  // namespace detail

// Gauss–Laguerre rule of order n (weight e^{-x} on [0, ∞)).
// Built from the Jacobi matrix of the Laguerre recurrence; weights are the
// squared first eigenvector components (total mass ∫ e^{-x} dx = 1).
inline QuadRule make_gauss_laguerre(int n) {
  if (n < 1) throw usage_error("gauss_laguerre: order must be >= 1");
  std::vector<double> d(n), e(n > 1 ? n - 1 : 0), q(n, 0.0);
  for (int k = 0; k < n; ++k) d[k] = 2.0 * k + 1.0;
  for (int k = 0; k + 1 < n; ++k) e[k] = k + 1.0;
  q[0] = 1.0;
  detail::tridiag_eigen_first_row(d, e, q);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });
  QuadRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.x[i] = d[idx[i]];
    rule.w[i] = q[idx[i]] * q[idx[i]];
  }
  return rule;
}

// Rules are immutable; cache by order.
inline const QuadRule& gauss_laguerre(int n) {
  static std::map<int, QuadRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_laguerre(n)).first;
  return it->second;
}

}  // namespace ecmac

#endif
