#pragma once

// Reverse-mode scalar on an explicit tape. Parameters become leaves, the
// loss is recorded as it is computed, and a single backward sweep over the
// topologically ordered node list yields all parameter adjoints. Tapes are
// independent objects; one tape per recorded computation.

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nidapbc/fwd.hpp"

namespace nidapbc {

class Tape;

struct Var {
  double v = 0.0;
  std::int32_t idx = -1;   // -1: constant, not recorded
  std::uint32_t gen = 0;
  Tape* tape = nullptr;

  Var() = default;
  Var(double c) : v(c) {}  // NOLINT: constants broadcast implicitly
};

inline double value_of(const Var& x) { return x.v; }

class Tape {
 public:
  Var leaf(double value) {
    Var r;
    r.v = value;
    r.idx = push_node(value, {});
    r.gen = gen_;
    r.tape = this;
    return r;
  }

  Var record(double value, std::initializer_list<std::pair<const Var*, double>> deps) {
    check_finite(value);
    Var r;
    r.v = value;
    small_.clear();
    for (const auto& [var, partial] : deps) {
      if (var->idx < 0) continue;  // constant operand
      if (var->tape != this || var->gen != gen_)
        throw std::logic_error("tape: operand recorded on a different tape");
      small_.emplace_back(var->idx, partial);
    }
    r.idx = push_node(value, small_);
    r.gen = gen_;
    r.tape = this;
    return r;
  }

  // n-ary node (e.g. the smallest-eigenvalue primitive)
  Var record_many(double value, const std::vector<std::pair<Var, double>>& deps) {
    check_finite(value);
    small_.clear();
    for (const auto& [var, partial] : deps) {
      if (var.idx < 0) continue;
      if (var.tape != this || var.gen != gen_)
        throw std::logic_error("tape: operand recorded on a different tape");
      small_.emplace_back(var.idx, partial);
    }
    Var r;
    r.v = value;
    r.idx = push_node(value, small_);
    r.gen = gen_;
    r.tape = this;
    return r;
  }

  // Adjoints of every node with respect to the given root.
  std::vector<double> backward(const Var& root) const {
    if (root.idx < 0 || root.tape != this || root.gen != gen_)
      throw std::logic_error("backward on unrecorded node");
    std::vector<double> adj(nodes_.size(), 0.0);
    adj[static_cast<std::size_t>(root.idx)] = 1.0;
    for (std::size_t i = static_cast<std::size_t>(root.idx) + 1; i-- > 0;) {
      const double a = adj[i];
      if (a == 0.0) continue;
      const Node& nd = nodes_[i];
      for (std::uint32_t k = 0; k < nd.pcnt; ++k)
        adj[parents_[nd.pbeg + k]] += a * partials_[nd.pbeg + k];
    }
    return adj;
  }

  double adjoint_of(const std::vector<double>& adj, const Var& x) const {
    if (x.idx < 0) return 0.0;
    if (x.tape != this || x.gen != gen_) throw std::logic_error("adjoint of foreign node");
    return adj[static_cast<std::size_t>(x.idx)];
  }

  std::size_t size() const { return nodes_.size(); }

  void reset() {
    nodes_.clear();
    parents_.clear();
    partials_.clear();
    ++gen_;
  }

 private:
  struct Node {
    double value;
    std::uint32_t pbeg;
    std::uint32_t pcnt;
  };

  std::int32_t push_node(double value, const std::vector<std::pair<std::int32_t, double>>& deps) {
    Node nd;
    nd.value = value;
    nd.pbeg = static_cast<std::uint32_t>(parents_.size());
    nd.pcnt = static_cast<std::uint32_t>(deps.size());
    for (const auto& [pidx, partial] : deps) {
      parents_.push_back(static_cast<std::uint32_t>(pidx));
      partials_.push_back(partial);
    }
    nodes_.push_back(nd);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> parents_;
  std::vector<double> partials_;
  std::vector<std::pair<std::int32_t, double>> small_;
  std::uint32_t gen_ = 0;
};

namespace detail {
inline Tape* joint_tape(const Var& a, const Var& b) {
  Tape* t = a.idx >= 0 ? a.tape : (b.idx >= 0 ? b.tape : nullptr);
  if (a.idx >= 0 && b.idx >= 0 && a.tape != b.tape)
    throw std::logic_error("tape: operands from different tapes");
  return t;
}
}  // namespace detail

inline Var operator+(const Var& a, const Var& b) {
  Tape* t = detail::joint_tape(a, b);
  if (!t) return Var(a.v + b.v);
  return t->record(a.v + b.v, {{&a, 1.0}, {&b, 1.0}});
}

inline Var operator-(const Var& a, const Var& b) {
  Tape* t = detail::joint_tape(a, b);
  if (!t) return Var(a.v - b.v);
  return t->record(a.v - b.v, {{&a, 1.0}, {&b, -1.0}});
}

inline Var operator-(const Var& a) {
  if (a.idx < 0) return Var(-a.v);
  return a.tape->record(-a.v, {{&a, -1.0}});
}

inline Var operator*(const Var& a, const Var& b) {
  Tape* t = detail::joint_tape(a, b);
  if (!t) return Var(a.v * b.v);
  return t->record(a.v * b.v, {{&a, b.v}, {&b, a.v}});
}

inline Var operator/(const Var& a, const Var& b) {
  Tape* t = detail::joint_tape(a, b);
  const double q = a.v / b.v;
  if (!t) return Var(q);
  return t->record(q, {{&a, 1.0 / b.v}, {&b, -q / b.v}});
}

inline Var operator+(const Var& a, double c) { return a + Var(c); }
inline Var operator+(double c, const Var& a) { return Var(c) + a; }
inline Var operator-(const Var& a, double c) { return a - Var(c); }
inline Var operator-(double c, const Var& a) { return Var(c) - a; }
inline Var operator*(const Var& a, double c) { return a * Var(c); }
inline Var operator*(double c, const Var& a) { return Var(c) * a; }
inline Var operator/(const Var& a, double c) { return a / Var(c); }
inline Var operator/(double c, const Var& a) { return Var(c) / a; }

namespace detail {
inline Var unary_var(const Var& a, double value, double deriv) {
  if (a.idx < 0) return Var(value);
  return a.tape->record(value, {{&a, deriv}});
}
}  // namespace detail

inline Var sin(const Var& a) { return detail::unary_var(a, std::sin(a.v), std::cos(a.v)); }
inline Var cos(const Var& a) { return detail::unary_var(a, std::cos(a.v), -std::sin(a.v)); }
inline Var tanh(const Var& a) {
  const double th = std::tanh(a.v);
  return detail::unary_var(a, th, 1.0 - th * th);
}
inline Var exp(const Var& a) {
  const double e = std::exp(a.v);
  return detail::unary_var(a, e, e);
}
inline Var log1p(const Var& a) { return detail::unary_var(a, std::log1p(a.v), 1.0 / (1.0 + a.v)); }
inline Var sqrt(const Var& a) {
  const double s = std::sqrt(a.v);
  return detail::unary_var(a, s, 0.5 / s);
}
inline Var sigmoid(const Var& a) {
  const double s = sigmoid(a.v);
  return detail::unary_var(a, s, s * (1.0 - s));
}
inline Var softplus(const Var& a) {
  return detail::unary_var(a, softplus(a.v), sigmoid(a.v));
}
inline Var abs(const Var& a) {
  if (a.v > 0.0) return a;
  if (a.v < 0.0) return -a;
  return Var(0.0);  // subgradient 0 at the kink
}
inline Var max0(const Var& a) { return a.v > 0.0 ? a : Var(0.0); }
inline Var max_c(const Var& a, double c) { return a.v > c ? a : Var(max_c(a.v, c)); }

}  // namespace nidapbc
