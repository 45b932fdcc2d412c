#pragma once

// Differentiation entry points. State derivatives run in forward mode (the
// state dimension is at most 4 here), parameter gradients in reverse mode
// over the tape; the forward levels nest under the reverse level so losses
// may contain state gradients and Jacobians of state gradients.

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nidapbc/fwd.hpp"
#include "nidapbc/linalg.hpp"
#include "nidapbc/tape.hpp"

namespace nidapbc {

struct NestingError : std::runtime_error {
  NestingError() : std::runtime_error("forward nesting depth exceeded (max 2 levels)") {}
};

namespace detail {
inline int& fwd_depth() {
  thread_local int depth = 0;
  return depth;
}

struct DepthGuard {
  DepthGuard() {
    if (++fwd_depth() > 2) {
      --fwd_depth();
      throw NestingError();
    }
  }
  ~DepthGuard() { --fwd_depth(); }
  DepthGuard(const DepthGuard&) = delete;
  DepthGuard& operator=(const DepthGuard&) = delete;
};

template <class S>
Vec<Fwd<S>> seed_identity(const Vec<S>& x) {
  const std::size_t n = x.size();
  Vec<Fwd<S>> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i].v = x[i];
    xs[i].t.assign(n, S(0));
    xs[i].t[i] = S(1);
  }
  return xs;
}
}  // namespace detail

// v . grad(program) at x, exact to the arithmetic (no finite differencing).
template <class F, class S>
S directional_derivative(F&& program, const Vec<S>& x, const Vec<double>& v) {
  if (v.size() != x.size())
    throw std::invalid_argument("directional_derivative: direction dimension mismatch");
  detail::DepthGuard guard;
  Vec<Fwd<S>> xs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xs[i].v = x[i];
    xs[i].t.assign(1, S(v[i]));
  }
  Fwd<S> y = program(xs);
  return y.tan(0);
}

template <class F, class S>
Vec<S> gradient_x(F&& program, const Vec<S>& x) {
  detail::DepthGuard guard;
  Vec<Fwd<S>> xs = detail::seed_identity(x);
  Fwd<S> y = program(xs);
  Vec<S> g(x.size(), S(0));
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = y.tan(i);
  return g;
}

// Rows index program outputs, columns state components. The program may
// itself call gradient_x (one extra forward level).
template <class F, class S>
Mat<S> jacobian_x(F&& program, const Vec<S>& x) {
  detail::DepthGuard guard;
  Vec<Fwd<S>> xs = detail::seed_identity(x);
  Vec<Fwd<S>> ys = program(xs);
  Mat<S> j(ys.size(), x.size(), S(0));
  for (std::size_t r = 0; r < ys.size(); ++r)
    for (std::size_t c = 0; c < x.size(); ++c) j(r, c) = ys[r].tan(c);
  return j;
}

template <class F, class S>
Mat<S> hessian_x(F&& program, const Vec<S>& x) {
  return jacobian_x(
      [&](const auto& xs) { return gradient_x(program, xs); }, x);
}

// Exact dloss/dtheta for every parameter; parameters the loss never touches
// get gradient 0.
template <class F>
std::vector<double> gradient_params(F&& loss, std::span<const double> theta) {
  Tape tape;
  Vec<Var> vars(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) vars[i] = tape.leaf(theta[i]);
  Var out = loss(vars);
  const std::vector<double> adj = tape.backward(out);
  std::vector<double> g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) g[i] = tape.adjoint_of(adj, vars[i]);
  return g;
}

}  // namespace nidapbc
