#pragma once

// Shared helpers for the test suites: finite-difference oracles and random
// probe generation. The FD oracles are the independent check the AD engine
// is measured against; they must never call into the engine.

#include <functional>
#include <random>
#include <vector>

#include "nidapbc/linalg.hpp"

namespace testutil {

using nidapbc::Mat;
using nidapbc::Vec;

// central finite difference of a scalar function of a state vector
inline Vec<double> fd_gradient(const std::function<double(const Vec<double>&)>& f,
                               const Vec<double>& x, double h = 1e-5) {
  Vec<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec<double> xp = x, xm = x;
    xp[i] = xp[i] + h;
    xm[i] = xm[i] - h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline Mat<double> fd_jacobian(const std::function<Vec<double>(const Vec<double>&)>& f,
                               const Vec<double>& x, double h = 1e-5) {
  const Vec<double> y0 = f(x);
  Mat<double> j(y0.size(), x.size());
  for (std::size_t c = 0; c < x.size(); ++c) {
    Vec<double> xp = x, xm = x;
    xp[c] = xp[c] + h;
    xm[c] = xm[c] - h;
    const Vec<double> yp = f(xp), ym = f(xm);
    for (std::size_t r = 0; r < y0.size(); ++r) j(r, c) = (yp[r] - ym[r]) / (2.0 * h);
  }
  return j;
}

inline std::vector<double> fd_gradient_flat(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& theta, double h = 1e-5) {
  std::vector<double> g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    std::vector<double> tp = theta, tm = theta;
    tp[i] += h;
    tm[i] -= h;
    g[i] = (f(tp) - f(tm)) / (2.0 * h);
  }
  return g;
}

inline double rel_err(double got, double want) {
  const double denom = std::max(1.0, std::abs(want));
  return std::abs(got - want) / denom;
}

inline Vec<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                              double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace testutil
