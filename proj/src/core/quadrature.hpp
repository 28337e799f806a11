#pragma once

#include <functional>
#include <vector>

#include "core/error.hpp"

namespace rfim::quad {

struct Options {
  double abs_tol = 1e-12;
  int max_subdivisions = 10000;
};

// Adaptive Simpson on [a, b]; a > b integrates with reversed sign.
// Throws Error(execution) when the subdivision budget runs out.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, Options opts = {});

struct Nodes {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Hermite nodes/weights for weight exp(-t^2) on R.
Nodes gauss_hermite(int n);

// Gauss-Legendre nodes/weights on [-1, 1].
Nodes gauss_legendre(int n);

}  // namespace rfim::quad
