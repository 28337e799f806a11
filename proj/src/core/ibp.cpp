#include "core/ibp.hpp"

#include <cmath>
#include <limits>

#include "core/rng.hpp"
#include "json.hpp"

namespace rfim::ibp {

using nlohmann::json;

std::string method_name(Method m) {
  switch (m) {
    case Method::exact_discrete: return "exact-discrete";
    case Method::quadrature: return "quadrature";
    case Method::monte_carlo: return "monte-carlo";
  }
  return "?";
}

namespace {

// integral_0^T min{a, b*u} du, closed form
double min_envelope(double T, double a, double b) {
  if (T <= 0.0) return 0.0;
  if (a <= 0.0 || b <= 0.0) return 0.0;
  const double ustar = a / b;
  if (T <= ustar) return 0.5 * b * T * T;
  return a * T - 0.5 * a * a / b;
}

void track(BoundCheck& bc, double lhs_abs, double envelope) {
  bc.worst_lhs = std::max(bc.worst_lhs, lhs_abs);
  bc.min_slack = std::min(bc.min_slack, envelope - lhs_abs);
  ++bc.checked;
}

double fd1(const std::function<double(double)>& f, double y, double e) {
  return (f(y + e) - f(y - e)) / (2.0 * e);
}

}  // namespace

void self_check(const TestFunction1& f) {
  const double grid[] = {-1.9, -1.2, -0.55, 0.1, 0.45, 0.9, 1.7};
  const double e = 1e-5;
  for (double y : grid) {
    if (std::abs(fd1(f.f, y, e) - f.d1(y)) > 1e-5 ||
        std::abs(fd1(f.d1, y, e) - f.d2(y)) > 1e-5 ||
        std::abs(fd1(f.d2, y, e) - f.d3(y)) > 1e-5)
      fail(ErrorKind::invalid_argument,
           "test function '" + f.name + "' failed the derivative self-check");
  }
}

void self_check(const TestFunction2& f) {
  const double grid[] = {-1.6, -0.7, 0.2, 0.8, 1.5};
  const double e = 1e-4;
  auto mixed11 = [&](double x, double y) {
    return (f.f(x + e, y + e) - f.f(x + e, y - e) - f.f(x - e, y + e) +
            f.f(x - e, y - e)) /
           (4.0 * e * e);
  };
  const double e1 = 1e-5;
  for (double x : grid) {
    for (double y : grid) {
      auto close = [&](double a, double b) { return std::abs(a - b) <= 1e-5; };
      if (!close(mixed11(x, y), f.d11(x, y)) ||
          !close((f.d11(x + e1, y) - f.d11(x - e1, y)) / (2 * e1), f.d21(x, y)) ||
          !close((f.d11(x, y + e1) - f.d11(x, y - e1)) / (2 * e1), f.d12(x, y)) ||
          !close((f.d21(x + e1, y) - f.d21(x - e1, y)) / (2 * e1), f.d31(x, y)) ||
          !close((f.d12(x, y + e1) - f.d12(x, y - e1)) / (2 * e1), f.d13(x, y)) ||
          !close((f.d31(x, y + e1) - f.d31(x, y - e1)) / (2 * e1), f.d32(x, y)))
        fail(ErrorKind::invalid_argument,
             "test function '" + f.name + "' failed the derivative self-check");
    }
  }
}

TestFunction1 make_test_function_1d(const std::string& name, double radius) {
  TestFunction1 tf;
  tf.name = name;
  tf.domain_radius = radius;
  if (name == "linear") {
    tf.f = [](double y) { return y; };
    tf.d1 = [](double) { return 1.0; };
    tf.d2 = [](double) { return 0.0; };
    tf.d3 = [](double) { return 0.0; };
    tf.sup_d1 = 1.0;
    tf.sup_d2 = 0.0;
    tf.sup_d3 = 0.0;
  } else if (name == "cubic") {
    tf.f = [](double y) { return y * y * y; };
    tf.d1 = [](double y) { return 3.0 * y * y; };
    tf.d2 = [](double y) { return 6.0 * y; };
    tf.d3 = [](double) { return 6.0; };
    tf.sup_d1 = 3.0 * radius * radius;
    tf.sup_d2 = 6.0 * radius;
    tf.sup_d3 = 6.0;
  } else if (name == "tanh") {
    tf.f = [](double y) { return std::tanh(y); };
    tf.d1 = [](double y) {
      const double t = std::tanh(y);
      return 1.0 - t * t;
    };
    tf.d2 = [](double y) {
      const double t = std::tanh(y);
      return -2.0 * t * (1.0 - t * t);
    };
    tf.d3 = [](double y) {
      const double t = std::tanh(y);
      return (1.0 - t * t) * (6.0 * t * t - 2.0);
    };
    tf.sup_d1 = 1.0;
    tf.sup_d2 = 4.0 / (3.0 * std::sqrt(3.0));
    tf.sup_d3 = 2.0;
  } else if (name == "sin") {
    tf.f = [](double y) { return std::sin(y); };
    tf.d1 = [](double y) { return std::cos(y); };
    tf.d2 = [](double y) { return -std::sin(y); };
    tf.d3 = [](double y) { return -std::cos(y); };
    tf.sup_d1 = 1.0;
    tf.sup_d2 = 1.0;
    tf.sup_d3 = 1.0;
  } else {
    fail(ErrorKind::invalid_argument, "unknown 1d test function '" + name + "'");
  }
  self_check(tf);
  return tf;
}

TestFunction2 make_test_function_2d(const std::string& name, double radius) {
  TestFunction2 tf;
  tf.name = name;
  tf.domain_radius = radius;
  if (name == "xy") {
    tf.f = [](double x, double y) { return x * y; };
    tf.d11 = [](double, double) { return 1.0; };
    tf.d21 = [](double, double) { return 0.0; };
    tf.d12 = [](double, double) { return 0.0; };
    tf.d31 = [](double, double) { return 0.0; };
    tf.d13 = [](double, double) { return 0.0; };
    tf.d32 = [](double, double) { return 0.0; };
    tf.sup_d11 = 1.0;
  } else if (name == "tanh-tanh") {
    auto t = [](double v) { return std::tanh(v); };
    auto t1 = [](double v) {
      const double u = std::tanh(v);
      return 1.0 - u * u;
    };
    auto t2 = [](double v) {
      const double u = std::tanh(v);
      return -2.0 * u * (1.0 - u * u);
    };
    auto t3 = [](double v) {
      const double u = std::tanh(v);
      return (1.0 - u * u) * (6.0 * u * u - 2.0);
    };
    tf.f = [t](double x, double y) { return t(x) * t(y); };
    tf.d11 = [t1](double x, double y) { return t1(x) * t1(y); };
    tf.d21 = [t2, t1](double x, double y) { return t2(x) * t1(y); };
    tf.d12 = [t1, t2](double x, double y) { return t1(x) * t2(y); };
    tf.d31 = [t3, t1](double x, double y) { return t3(x) * t1(y); };
    tf.d13 = [t1, t3](double x, double y) { return t1(x) * t3(y); };
    tf.d32 = [t3, t2](double x, double y) { return t3(x) * t2(y); };
    const double m2 = 4.0 / (3.0 * std::sqrt(3.0));
    tf.sup_d11 = 1.0;
    tf.sup_d21 = m2;
    tf.sup_d12 = m2;
    tf.sup_d31 = 2.0;
    tf.sup_d13 = 2.0;
  } else if (name == "sin-sin") {
    tf.f = [](double x, double y) { return std::sin(x) * std::sin(y); };
    tf.d11 = [](double x, double y) { return std::cos(x) * std::cos(y); };
    tf.d21 = [](double x, double y) { return -std::sin(x) * std::cos(y); };
    tf.d12 = [](double x, double y) { return -std::cos(x) * std::sin(y); };
    tf.d31 = [](double x, double y) { return -std::cos(x) * std::cos(y); };
    tf.d13 = [](double x, double y) { return -std::cos(x) * std::cos(y); };
    tf.d32 = [](double x, double y) { return std::cos(x) * std::sin(y); };
    tf.sup_d11 = 1.0;
    tf.sup_d21 = 1.0;
    tf.sup_d12 = 1.0;
    tf.sup_d31 = 1.0;
    tf.sup_d13 = 1.0;
  } else {
    fail(ErrorKind::invalid_argument, "unknown 2d test function '" + name + "'");
  }
  self_check(tf);
  return tf;
}

std::vector<std::string> catalog_1d() { return {"linear", "cubic", "tanh", "sin"}; }
std::vector<std::string> catalog_2d() { return {"xy", "tanh-tanh", "sin-sin"}; }

namespace {

struct Weighted {
  double y;
  double w;
};

// Node rules for laws whose expectations reduce to fixed nodes.
bool axis_nodes(const ZetaDistribution& dist, int n,
                std::vector<Weighted>& out) {
  out.clear();
  switch (dist.kind) {
    case ZetaKind::rademacher:
      out = {{-1.0, 0.5}, {1.0, 0.5}};
      return true;
    case ZetaKind::gaussian: {
      const auto gh = quad::gauss_hermite(n);
      const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
      for (std::size_t i = 0; i < gh.x.size(); ++i)
        out.push_back({std::sqrt(2.0) * gh.x[i], gh.w[i] * inv_sqrt_pi});
      return true;
    }
    case ZetaKind::uniform: {
      const auto gl = quad::gauss_legendre(n);
      for (std::size_t i = 0; i < gl.x.size(); ++i)
        out.push_back({std::sqrt(3.0) * gl.x[i], 0.5 * gl.w[i]});
      return true;
    }
    default:
      return false;
  }
}

double density(const ZetaDistribution& dist, double y) {
  switch (dist.kind) {
    case ZetaKind::centered_exponential:
      return y >= -1.0 ? std::exp(-(y + 1.0)) : 0.0;
    case ZetaKind::student_t: {
      const double nu = dist.nu;
      const double s = std::sqrt((nu - 2.0) / nu);
      const double t = y / s;
      const double logc = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                          0.5 * std::log(nu * M_PI);
      return std::exp(logc - 0.5 * (nu + 1.0) * std::log1p(t * t / nu)) / s;
    }
    default:
      fail(ErrorKind::invalid_argument, "no closed density for this law here");
  }
}

std::vector<double> adaptive_breaks(const ZetaDistribution& dist) {
  if (dist.kind == ZetaKind::centered_exponential)
    return {-1.0, 0.0, 4.0, 12.0, 60.0};
  // student-t, nu > 5: the tail beyond 400 is below 1e-9 for growth up to y^4
  return {-400.0, -30.0, -8.0, 0.0, 8.0, 30.0, 400.0};
}

double integrate_piecewise(const std::function<double(double)>& f,
                           const std::vector<double>& breaks,
                           const quad::Options& opts) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    acc += quad::integrate_adaptive(f, breaks[i], breaks[i + 1], opts);
  return acc;
}

struct Terms1 {
  double lhs, main, g1, g2;  // y f, f', y*I2, I3
};

}  // namespace

RemainderReport gamma_1d(const ZetaDistribution& dist, const TestFunction1& f,
                         Method method, const EvalOptions& opts) {
  RemainderReport rep;
  rep.dist_x = dist.name();
  rep.fname = f.name;
  rep.method = method_name(method);

  BoundCheck bc;
  bc.name = "second-order-envelope";
  bc.min_slack = std::numeric_limits<double>::infinity();

  // exact-discrete keeps adaptive inner integrals for its 1e-10 budget;
  // the many-point paths use a fixed 48-node Gauss-Legendre rule, spectral
  // on this smooth catalog. Long ranges (heavy-tail outer points) fall
  // back to adaptive, where a fixed rule cannot resolve oscillation.
  const quad::Nodes gl = quad::gauss_legendre(48);
  auto inner = [&](double y, const std::function<double(double)>& d) {
    if (method == Method::exact_discrete || std::abs(y) > 40.0)
      return quad::integrate_adaptive(
          [&](double u) { return (y - u) * d(u); }, 0.0, y, opts.inner);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double u = 0.5 * y * (gl.x[i] + 1.0);
      acc += 0.5 * y * gl.w[i] * (y - u) * d(u);
    }
    return acc;
  };
  auto inner_i2 = [&](double y) { return inner(y, f.d2); };
  auto inner_i3 = [&](double y) { return inner(y, f.d3); };

  auto eval_point = [&](double y) -> Terms1 {
    const double i2 = inner_i2(y);
    const double i3 = inner_i3(y);
    if (std::abs(y) <= f.domain_radius) {
      const double env =
          std::abs(y) * min_envelope(std::abs(y), 2.0 * f.sup_d1, f.sup_d2);
      track(bc, std::abs(y * i2), env);
    } else {
      ++bc.skipped;
    }
    return {y * f.f(y), f.d1(y), y * i2, i3};
  };

  switch (method) {
    case Method::exact_discrete: {
      if (dist.kind != ZetaKind::rademacher)
        fail(ErrorKind::invalid_argument,
             "exact-discrete applies only to finitely supported laws");
      std::vector<Weighted> pts;
      axis_nodes(dist, 0, pts);
      for (const auto& p : pts) {
        const Terms1 t = eval_point(p.y);
        rep.lhs += p.w * t.lhs;
        rep.main_term += p.w * t.main;
        rep.gamma2 += p.w * (t.g1 - t.g2);
        ++rep.points;
      }
      break;
    }
    case Method::quadrature: {
      std::vector<Weighted> pts;
      if (axis_nodes(dist, opts.nodes_1d, pts)) {
        for (const auto& p : pts) {
          const Terms1 t = eval_point(p.y);
          rep.lhs += p.w * t.lhs;
          rep.main_term += p.w * t.main;
          rep.gamma2 += p.w * (t.g1 - t.g2);
          ++rep.points;
        }
      } else {
        const auto breaks = adaptive_breaks(dist);
        rep.lhs = integrate_piecewise(
            [&](double y) { return density(dist, y) * y * f.f(y); }, breaks,
            opts.outer);
        rep.main_term = integrate_piecewise(
            [&](double y) { return density(dist, y) * f.d1(y); }, breaks,
            opts.outer);
        const double eg1 = integrate_piecewise(
            [&](double y) {
              ++rep.points;
              const double i2 = inner_i2(y);
              if (std::abs(y) <= f.domain_radius) {
                const double env = std::abs(y) * min_envelope(std::abs(y),
                                                              2.0 * f.sup_d1,
                                                              f.sup_d2);
                track(bc, std::abs(y * i2), env);
              } else {
                ++bc.skipped;
              }
              return density(dist, y) * y * i2;
            },
            breaks, opts.outer);
        const double eg2 = integrate_piecewise(
            [&](double y) { return density(dist, y) * inner_i3(y); }, breaks,
            opts.outer);
        rep.gamma2 = eg1 - eg2;
      }
      break;
    }
    case Method::monte_carlo: {
      RngStream stream(opts.mc_seed);
      double c_sum = 0, c2_sum = 0, g_sum = 0, g2_sum = 0;
      const long n = opts.mc_samples_1d;
      for (long i = 0; i < n; ++i) {
        const double y = dist.sample(stream);
        const Terms1 t = eval_point(y);
        const double g = t.g1 - t.g2;
        const double c = t.lhs - t.main - g;
        c_sum += c;
        c2_sum += c * c;
        g_sum += g;
        g2_sum += g * g;
        rep.lhs += t.lhs;
        rep.main_term += t.main;
        ++rep.points;
      }
      rep.lhs /= static_cast<double>(n);
      rep.main_term /= static_cast<double>(n);
      rep.gamma2 = g_sum / static_cast<double>(n);
      const double c_mean = c_sum / static_cast<double>(n);
      const double c_var =
          std::max(0.0, c2_sum / static_cast<double>(n) - c_mean * c_mean);
      rep.residual_se = std::sqrt(c_var / static_cast<double>(n));
      const double g_mean = rep.gamma2;
      const double g_var =
          std::max(0.0, g2_sum / static_cast<double>(n) - g_mean * g_mean);
      rep.gamma2_se = std::sqrt(g_var / static_cast<double>(n));
      break;
    }
  }
  rep.residual = rep.lhs - rep.main_term - rep.gamma2;
  bc.ok = bc.checked == 0 || bc.min_slack >= -1e-12;
  rep.bounds.push_back(bc);
  return rep;
}

RemainderReport gamma_2d(const ZetaDistribution& dist_x,
                         const ZetaDistribution& dist_y, const TestFunction2& f,
                         Method method, const EvalOptions& opts) {
  RemainderReport rep;
  rep.dist_x = dist_x.name();
  rep.dist_y = dist_y.name();
  rep.fname = f.name;
  rep.method = method_name(method);

  BoundCheck b1, b2, b3, b4;
  b1.name = "double-envelope";
  b2.name = "boundary-x-envelope";
  b3.name = "boundary-y-envelope";
  b4.name = "boundary-y-mixed-envelope";
  for (BoundCheck* b : {&b1, &b2, &b3, &b4})
    b->min_slack = std::numeric_limits<double>::infinity();

  // Inner double integral over [0,x] x [0,y] of (x-u) d(u,v). The
  // exact-discrete path keeps nested adaptive integration for its 1e-10
  // budget; the many-point outer rules use a fixed tensor Gauss-Legendre
  // rule, which is exact to machine precision on this smooth catalog.
  const quad::Nodes gl = quad::gauss_legendre(32);
  auto double_integral = [&](double x, double y,
                             const std::function<double(double, double)>& d) {
    if (method == Method::exact_discrete) {
      return quad::integrate_adaptive(
          [&](double v) {
            return quad::integrate_adaptive(
                [&](double u) { return (x - u) * d(u, v); }, 0.0, x, opts.inner);
          },
          0.0, y, opts.outer);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double u = 0.5 * x * (gl.x[i] + 1.0);
      const double wu = 0.5 * x * gl.w[i];
      double inner = 0.0;
      for (std::size_t j = 0; j < gl.x.size(); ++j) {
        const double v = 0.5 * y * (gl.x[j] + 1.0);
        inner += 0.5 * y * gl.w[j] * d(u, v);
      }
      acc += wu * (x - u) * inner;
    }
    return acc;
  };

  auto single_integral = [&](double upper,
                             const std::function<double(double)>& d) {
    if (method == Method::exact_discrete || std::abs(upper) > 40.0)
      return quad::integrate_adaptive(
          [&](double u) { return (upper - u) * d(u); }, 0.0, upper, opts.inner);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double u = 0.5 * upper * (gl.x[i] + 1.0);
      acc += 0.5 * upper * gl.w[i] * (upper - u) * d(u);
    }
    return acc;
  };

  // The Taylor expansion of XYf leaves four remainder pieces with
  // non-vanishing expectation: the (2,1) double integral, the (3,2)
  // double integral, the two third-order boundary integrals, and the
  // second-order boundary term X^2 Y int_0^Y (Y-v) d12 f(0,v) dv. The
  // last one vanishes for f without mixed curvature (for example x*y)
  // but not in general; dropping it leaves an O(1) defect in the
  // identity, as the product-function factorization oracle confirms.
  struct Terms2 {
    double lhs, main, p1, p2, p3x, p3y, p4;
  };
  auto eval_point = [&](double x, double y) -> Terms2 {
    Terms2 t{};
    t.lhs = x * y * f.f(x, y);
    t.main = f.d11(x, y);
    const double d21 = double_integral(x, y, f.d21);
    t.p1 = x * y * d21;
    t.p2 = double_integral(x, y, f.d32);
    t.p3x = single_integral(x, [&](double u) { return f.d31(u, 0.0); });
    t.p3y = single_integral(y, [&](double v) { return f.d13(0.0, v); });
    t.p4 = y * single_integral(y, [&](double v) { return f.d12(0.0, v); });
    const double ax = std::abs(x), ay = std::abs(y);
    if (ax <= f.domain_radius && ay <= f.domain_radius) {
      track(b1, std::abs(t.p1),
            ax * ay * ay * min_envelope(ax, 2.0 * f.sup_d11, f.sup_d21));
      track(b2, std::abs(t.p3x), min_envelope(ax, 2.0 * f.sup_d21, f.sup_d31));
      track(b3, std::abs(t.p3y), min_envelope(ay, 2.0 * f.sup_d12, f.sup_d13));
      track(b4, std::abs(t.p4),
            ay * min_envelope(ay, 2.0 * f.sup_d11, f.sup_d12));
    } else {
      ++b1.skipped;
      ++b2.skipped;
      ++b3.skipped;
      ++b4.skipped;
    }
    return t;
  };

  auto accumulate_nodes = [&](const std::vector<Weighted>& px,
                              const std::vector<Weighted>& py) {
    double e_p1 = 0, e_p2 = 0, e_p3x = 0, e_p3y = 0, e_p4 = 0;
    for (const auto& wx : px) {
      for (const auto& wy : py) {
        const double w = wx.w * wy.w;
        const Terms2 t = eval_point(wx.y, wy.y);
        rep.lhs += w * t.lhs;
        rep.main_term += w * t.main;
        e_p1 += w * t.p1;
        e_p2 += w * t.p2;
        e_p3x += w * t.p3x;
        e_p3y += w * t.p3y;
        e_p4 += w * t.p4;
        ++rep.points;
      }
    }
    rep.gamma2 = e_p1 - e_p2 - (e_p3x + e_p3y) + e_p4;
  };

  switch (method) {
    case Method::exact_discrete: {
      if (dist_x.kind != ZetaKind::rademacher || dist_y.kind != ZetaKind::rademacher)
        fail(ErrorKind::invalid_argument,
             "exact-discrete applies only to finitely supported laws");
      std::vector<Weighted> px, py;
      axis_nodes(dist_x, 0, px);
      axis_nodes(dist_y, 0, py);
      accumulate_nodes(px, py);
      break;
    }
    case Method::quadrature: {
      std::vector<Weighted> px, py;
      if (!axis_nodes(dist_x, opts.nodes_2d, px) ||
          !axis_nodes(dist_y, opts.nodes_2d, py))
        fail(ErrorKind::invalid_argument,
             "2d quadrature supports gaussian, uniform, and rademacher axes; "
             "use monte-carlo for the other laws");
      accumulate_nodes(px, py);
      break;
    }
    case Method::monte_carlo: {
      RngStream sx = RngStream::substream(opts.mc_seed, 1);
      RngStream sy = RngStream::substream(opts.mc_seed, 2);
      double c_sum = 0, c2_sum = 0, g_sum = 0, g2_sum = 0;
      const long n = opts.mc_samples_2d;
      for (long i = 0; i < n; ++i) {
        const double x = dist_x.sample(sx);
        const double y = dist_y.sample(sy);
        const Terms2 t = eval_point(x, y);
        const double g = t.p1 - t.p2 - (t.p3x + t.p3y) + t.p4;
        const double c = t.lhs - t.main - g;
        c_sum += c;
        c2_sum += c * c;
        g_sum += g;
        g2_sum += g * g;
        rep.lhs += t.lhs;
        rep.main_term += t.main;
        ++rep.points;
      }
      rep.lhs /= static_cast<double>(n);
      rep.main_term /= static_cast<double>(n);
      rep.gamma2 = g_sum / static_cast<double>(n);
      const double c_mean = c_sum / static_cast<double>(n);
      const double c_var =
          std::max(0.0, c2_sum / static_cast<double>(n) - c_mean * c_mean);
      rep.residual_se = std::sqrt(c_var / static_cast<double>(n));
      const double g_var = std::max(
          0.0, g2_sum / static_cast<double>(n) - rep.gamma2 * rep.gamma2);
      rep.gamma2_se = std::sqrt(g_var / static_cast<double>(n));
      break;
    }
  }
  rep.residual = rep.lhs - rep.main_term - rep.gamma2;
  for (BoundCheck* b : {&b1, &b2, &b3, &b4}) {
    b->ok = b->checked == 0 || b->min_slack >= -1e-12;
    rep.bounds.push_back(*b);
  }
  return rep;
}

std::vector<BoundCheck> remainder_bounds_check(const RemainderReport& report) {
  std::vector<BoundCheck> out = report.bounds;
  for (auto& b : out) b.ok = b.checked == 0 || b.min_slack >= -1e-12;
  return out;
}

bool bounds_ok(const RemainderReport& report) {
  for (const auto& b : remainder_bounds_check(report))
    if (!b.ok) return false;
  return true;
}

std::vector<SuiteCase1> default_suite_1d() {
  std::vector<SuiteCase1> cases;
  const auto rade = ZetaDistribution::make(ZetaKind::rademacher);
  const auto gauss = ZetaDistribution::make(ZetaKind::gaussian);
  const auto unif = ZetaDistribution::make(ZetaKind::uniform);
  const auto cexp = ZetaDistribution::make(ZetaKind::centered_exponential);
  const auto st7 = ZetaDistribution::make(ZetaKind::student_t, 7.0);
  for (const auto& fname : catalog_1d()) {
    cases.push_back({rade, fname, Method::exact_discrete, 1.0});
    cases.push_back({rade, fname, Method::monte_carlo, 1.0});
    cases.push_back({gauss, fname, Method::quadrature, 25.0});
    cases.push_back({unif, fname, Method::quadrature, 2.0});
    cases.push_back({cexp, fname, Method::quadrature, 61.0});
    cases.push_back({st7, fname, Method::quadrature, 1001.0});
  }
  cases.push_back({gauss, "tanh", Method::monte_carlo, 25.0});
  cases.push_back({st7, "sin", Method::monte_carlo, 1001.0});
  return cases;
}

std::vector<SuiteCase2> default_suite_2d() {
  std::vector<SuiteCase2> cases;
  const auto rade = ZetaDistribution::make(ZetaKind::rademacher);
  const auto gauss = ZetaDistribution::make(ZetaKind::gaussian);
  const auto unif = ZetaDistribution::make(ZetaKind::uniform);
  const auto cexp = ZetaDistribution::make(ZetaKind::centered_exponential);
  const auto st7 = ZetaDistribution::make(ZetaKind::student_t, 7.0);
  for (const auto& fname : catalog_2d()) {
    cases.push_back({rade, rade, fname, Method::exact_discrete, 1.0});
    cases.push_back({rade, rade, fname, Method::monte_carlo, 1.0});
    cases.push_back({gauss, gauss, fname, Method::quadrature, 25.0});
    cases.push_back({gauss, rade, fname, Method::quadrature, 25.0});
  }
  cases.push_back({unif, cexp, "tanh-tanh", Method::monte_carlo, 61.0});
  cases.push_back({st7, gauss, "tanh-tanh", Method::monte_carlo, 1001.0});
  return cases;
}

std::vector<RemainderReport> run_suite(const EvalOptions& opts) {
  std::vector<RemainderReport> reports;
  for (const auto& c : default_suite_1d()) {
    const auto f = make_test_function_1d(c.fname, c.radius);
    reports.push_back(gamma_1d(c.dist, f, c.method, opts));
  }
  for (const auto& c : default_suite_2d()) {
    const auto f = make_test_function_2d(c.fname, c.radius);
    reports.push_back(gamma_2d(c.dist_x, c.dist_y, f, c.method, opts));
  }
  return reports;
}

namespace {

json report_to_json(const RemainderReport& r) {
  json j;
  j["dist_x"] = r.dist_x;
  if (!r.dist_y.empty()) j["dist_y"] = r.dist_y;
  j["f"] = r.fname;
  j["method"] = r.method;
  j["lhs"] = r.lhs;
  j["main_term"] = r.main_term;
  j["gamma2"] = r.gamma2;
  j["residual"] = r.residual;
  if (r.residual_se > 0) j["residual_se"] = r.residual_se;
  if (r.gamma2_se > 0) j["gamma2_se"] = r.gamma2_se;
  j["points"] = r.points;
  json bounds = json::array();
  for (const auto& b : r.bounds) {
    json bj;
    bj["name"] = b.name;
    bj["worst_lhs"] = b.worst_lhs;
    bj["min_slack"] = std::isfinite(b.min_slack) ? b.min_slack : 0.0;
    bj["checked"] = b.checked;
    bj["skipped"] = b.skipped;
    bj["ok"] = b.ok;
    bounds.push_back(bj);
  }
  j["bounds"] = bounds;
  return j;
}

}  // namespace

std::string reports_to_json(const std::vector<RemainderReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr.dump(2);
}

}  // namespace rfim::ibp
