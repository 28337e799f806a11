#include "core/quadrature.hpp"

#include <cmath>

namespace rfim::quad {

namespace {

struct SimpsonState {
  const std::function<double(double)>* f;
  int budget;
  double fmax;  // largest |f| seen; sets the rounding-noise floor

  double eval(double x) {
    const double v = (*f)(x);
    fmax = std::max(fmax, std::abs(v));
    return v;
  }
};

double simpson(SimpsonState& st, double a, double fa, double b, double fb,
               double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = st.eval(lm), frm = st.eval(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // floor at the rounding noise of the panel sums; below it subdivision
  // cannot improve the estimate
  const double noise = 1e-15 * st.fmax * (b - a);
  const double accept = std::max(tol, noise);
  if (depth > 0 && std::abs(delta) <= 15.0 * accept)
    return left + right + delta / 15.0;
  if (st.budget <= 0)
    fail(ErrorKind::execution,
         "quadrature: subdivision budget exceeded before reaching tolerance");
  st.budget -= 2;
  return simpson(st, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
         simpson(st, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, Options opts) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  SimpsonState st{&f, opts.max_subdivisions, 0.0};
  const double m = 0.5 * (a + b);
  const double fa = st.eval(a), fb = st.eval(b), fm = st.eval(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return sign * simpson(st, a, fa, b, fb, m, fm, whole, opts.abs_tol, 0);
}

Nodes gauss_hermite(int n) {
  if (n < 1) fail(ErrorKind::invalid_argument, "gauss_hermite: n >= 1");
  Nodes out;
  out.x.resize(static_cast<std::size_t>(n));
  out.w.resize(static_cast<std::size_t>(n));
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * out.x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * out.x[1];
    else
      z = 2.0 * z - out.x[static_cast<std::size_t>(i - 2)];
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    out.x[static_cast<std::size_t>(i)] = z;
    out.x[static_cast<std::size_t>(n - 1 - i)] = -z;
    out.w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    out.w[static_cast<std::size_t>(n - 1 - i)] = out.w[static_cast<std::size_t>(i)];
  }
  return out;
}

Nodes gauss_legendre(int n) {
  if (n < 1) fail(ErrorKind::invalid_argument, "gauss_legendre: n >= 1");
  Nodes out;
  out.x.resize(static_cast<std::size_t>(n));
  out.w.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    out.x[static_cast<std::size_t>(i)] = -z;
    out.x[static_cast<std::size_t>(n - 1 - i)] = z;
    out.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    out.w[static_cast<std::size_t>(n - 1 - i)] = out.w[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace rfim::quad
