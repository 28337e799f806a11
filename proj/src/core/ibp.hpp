#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/disorder.hpp"
#include "core/quadrature.hpp"

namespace rfim::ibp {

enum class Method { exact_discrete, quadrature, monte_carlo };

std::string method_name(Method m);

// Arity-1 probe function with analytic derivatives up to order three and
// sup-norms stated on |y| <= domain_radius.
struct TestFunction1 {
  std::string name;
  std::function<double(double)> f, d1, d2, d3;
  double sup_d1 = 0, sup_d2 = 0, sup_d3 = 0;
  double domain_radius = 1.0;
};

// Arity-2 probe function with the mixed partials (1,1), (2,1), (1,2),
// (3,1), (1,3), (3,2) supplied analytically.
struct TestFunction2 {
  std::string name;
  std::function<double(double, double)> f, d11, d21, d12, d31, d13, d32;
  double sup_d11 = 0, sup_d21 = 0, sup_d12 = 0, sup_d31 = 0, sup_d13 = 0;
  double domain_radius = 1.0;
};

// Registration gate: analytic derivatives must match central finite
// differences of f on a probe grid within 1e-5. Throws otherwise.
void self_check(const TestFunction1& f);
void self_check(const TestFunction2& f);

// Catalog: linear, cubic, tanh, sin (1d); xy, tanh-tanh, sin-sin (2d).
TestFunction1 make_test_function_1d(const std::string& name, double domain_radius);
TestFunction2 make_test_function_2d(const std::string& name, double domain_radius);
std::vector<std::string> catalog_1d();
std::vector<std::string> catalog_2d();

struct BoundCheck {
  std::string name;  // "second-order-envelope", "boundary-x", ...
  double worst_lhs = 0.0;
  double min_slack = 0.0;  // min over grid of (envelope - |integral|)
  long checked = 0;
  long skipped = 0;  // points beyond the stated sup-norm domain
  bool ok = true;
};

struct RemainderReport {
  std::string dist_x;
  std::string dist_y;  // empty for arity 1
  std::string fname;
  std::string method;
  double lhs = 0.0;        // E[Y f] or E[X Y f]
  double main_term = 0.0;  // sigma^2 E f' or sigma_X^2 sigma_Y^2 E d11 f
  double gamma2 = 0.0;     // remainder from its defining integrals
  double residual = 0.0;   // lhs - main_term - gamma2 (identity: ~0)
  double residual_se = 0.0;  // monte-carlo only
  double gamma2_se = 0.0;    // monte-carlo only
  long points = 0;
  std::vector<BoundCheck> bounds;
};

struct EvalOptions {
  quad::Options inner;   // inner Taylor-remainder integrals
  quad::Options outer;   // adaptive outer expectations (continuous laws)
  int nodes_1d = 96;     // Gauss nodes for gaussian/uniform expectations
  int nodes_2d = 96;
  long mc_samples_1d = 50000;
  long mc_samples_2d = 2000;
  std::uint64_t mc_seed = 20240501;

  EvalOptions() {
    inner.abs_tol = 1e-13;
    outer.abs_tol = 1e-11;
  }
};

RemainderReport gamma_1d(const ZetaDistribution& dist, const TestFunction1& f,
                         Method method, const EvalOptions& opts = {});

RemainderReport gamma_2d(const ZetaDistribution& dist_x,
                         const ZetaDistribution& dist_y, const TestFunction2& f,
                         Method method, const EvalOptions& opts = {});

// Pure check over the envelope extremes recorded in a report.
std::vector<BoundCheck> remainder_bounds_check(const RemainderReport& report);
bool bounds_ok(const RemainderReport& report);

// The registered (dist, f, method) cross-product.
struct SuiteCase1 {
  ZetaDistribution dist;
  std::string fname;
  Method method;
  double radius;
};
struct SuiteCase2 {
  ZetaDistribution dist_x, dist_y;
  std::string fname;
  Method method;
  double radius;
};
std::vector<SuiteCase1> default_suite_1d();
std::vector<SuiteCase2> default_suite_2d();

std::vector<RemainderReport> run_suite(const EvalOptions& opts = {});
std::string reports_to_json(const std::vector<RemainderReport>& reports);

}  // namespace rfim::ibp
