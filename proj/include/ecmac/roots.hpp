#ifndef ECMAC_ROOTS_HPP
#define ECMAC_ROOTS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "ecmac/errors.hpp"

namespace ecmac {

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Plain bisection on [lo, hi]; requires a sign change. Returns the midpoint
// once the bracket width drops below xtol (absolute) or rtol (relative).
template <class F>
RootResult bisect(F&& f, double lo, double hi, double xtol = 1e-12,
                  double rtol = 1e-12, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0, true};
  if (fhi == 0.0) return {hi, 0.0, 0, true};
  if ((flo > 0.0) == (fhi > 0.0)) return {0.5 * (lo + hi), flo, 0, false};
  RootResult res;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0 || hi - lo < xtol + rtol * std::abs(mid)) {
      res.x = mid;
      res.fx = fmid;
      res.converged = true;
      return res;
    }
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  res.x = 0.5 * (lo + hi);
  res.fx = f(res.x);
  res.converged = true;  // bracket shrank by 2^-200 regardless
  return res;
}

// Brent's method (inverse quadratic / secant with bisection safeguard).
template <class F>
RootResult brent(F&& f, double a, double b, double xtol = 1e-13,
                 int max_iter = 120) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return {a, 0.0, 0, true};
  if (fb == 0.0) return {b, 0.0, 0, true};
  if ((fa > 0.0) == (fb > 0.0)) return {0.5 * (a + b), fa, 0, false};
  double c = a, fc = fa;
  double d = b - a, e = d;
  RootResult res;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 =
        2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) {
      res.x = b;
      res.fx = fb;
      res.converged = true;
      return res;
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  res.x = b;
  res.fx = fb;
  res.converged = false;
  return res;
}

// Solves g(x) = target for a monotone decreasing map on (0, inf), expanding
// a multiplicative bracket around x0 before bisecting on log x.
template <class G>
RootResult solve_decreasing(G&& g, double target, double x0,
                            double rtol = 1e-10, int max_expand = 80,
                            int max_iter = 200) {
  double lo = x0, hi = x0;
  double glo = g(lo);
  int expansions = 0;
  while (glo < target && expansions++ < max_expand) {
    lo *= 0.5;
    glo = g(lo);
  }
  double ghi = g(hi);
  while (ghi > target && expansions++ < max_expand) {
    hi *= 2.0;
    ghi = g(hi);
  }
  if (glo < target || ghi > target)
    return {0.5 * (lo + hi), glo - target, expansions, false};
  auto h = [&](double ln_x) { return g(std::exp(ln_x)) - target; };
  RootResult r = bisect(h, std::log(lo), std::log(hi), 0.0, rtol, max_iter);
  r.x = std::exp(r.x);
  return r;
}

// Golden-section maximization on [a, b] for a unimodal objective.
template <class F>
double golden_max(F&& f, double a, double b, double xtol = 1e-7,
                  int max_iter = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

}  // namespace ecmac

#endif
