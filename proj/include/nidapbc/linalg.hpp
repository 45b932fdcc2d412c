#pragma once

// Small dense vectors and matrices, generic over the scalar type so the
// same formulas run on plain doubles and on AD scalars. Sizes in this
// project never exceed a handful of rows, so everything is direct and
// allocation is not a concern outside the batched training path.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace nidapbc {

inline double value_of(double x) { return x; }

template <class T>
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n) : d_(n) {}
  Vec(std::size_t n, const T& fill) : d_(n, fill) {}
  Vec(std::initializer_list<T> xs) : d_(xs) {}

  std::size_t size() const { return d_.size(); }
  T& operator[](std::size_t i) { return d_[i]; }
  const T& operator[](std::size_t i) const { return d_[i]; }
  T* data() { return d_.data(); }
  const T* data() const { return d_.data(); }
  auto begin() { return d_.begin(); }
  auto end() { return d_.end(); }
  auto begin() const { return d_.begin(); }
  auto end() const { return d_.end(); }

 private:
  std::vector<T> d_;
};

template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t r, std::size_t c) : r_(r), c_(c), d_(r * c) {}
  Mat(std::size_t r, std::size_t c, const T& fill) : r_(r), c_(c), d_(r * c, fill) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n, T(0));
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  T& operator()(std::size_t i, std::size_t j) { return d_[i * c_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return d_[i * c_ + j]; }

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<T> d_;
};

// ---- elementwise vector/matrix arithmetic -------------------------------

template <class T>
Vec<T> operator+(const Vec<T>& a, const Vec<T>& b) {
  assert(a.size() == b.size());
  Vec<T> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

template <class T>
Vec<T> operator-(const Vec<T>& a, const Vec<T>& b) {
  assert(a.size() == b.size());
  Vec<T> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

template <class T>
Vec<T> operator-(const Vec<T>& a) {
  Vec<T> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

template <class T, class U>
auto operator*(const U& s, const Vec<T>& a) {
  using R = decltype(s * a[0]);
  Vec<R> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

template <class T>
Mat<T> operator+(const Mat<T>& a, const Mat<T>& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  Mat<T> r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

template <class T>
Mat<T> operator-(const Mat<T>& a, const Mat<T>& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  Mat<T> r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

template <class T>
Mat<T> transpose(const Mat<T>& a) {
  Mat<T> r(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
  return r;
}

// matvec with scalar promotion (e.g. Mat<double> * Vec<Fwd>)
template <class TA, class TX>
auto operator*(const Mat<TA>& a, const Vec<TX>& x) {
  assert(a.cols() == x.size());
  using R = decltype(a(0, 0) * x[0]);
  Vec<R> y(a.rows(), R(0));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    R acc(0);
    for (std::size_t j = 0; j < a.cols(); ++j) acc = acc + a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

template <class TA, class TB>
auto operator*(const Mat<TA>& a, const Mat<TB>& b) {
  assert(a.cols() == b.rows());
  using R = decltype(a(0, 0) * b(0, 0));
  Mat<R> c(a.rows(), b.cols(), R(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = c(i, j) + a(i, k) * b(k, j);
  return c;
}

template <class TA, class TX>
auto dot(const Vec<TA>& a, const Vec<TX>& b) {
  assert(a.size() == b.size());
  using R = decltype(a[0] * b[0]);
  R acc(0);
  for (std::size_t i = 0; i < a.size(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

// ---- direct solves -------------------------------------------------------

// LU with partial pivoting; generic scalar so derivatives flow through the
// factorization. Pivot choice compares value parts only.
template <class T>
Vec<T> lu_solve(Mat<T> a, Vec<T> b) {
  const std::size_t n = a.rows();
  assert(a.cols() == n && b.size() == n);
  std::vector<std::size_t> piv(n);
  for (std::size_t i = 0; i < n; ++i) piv[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(value_of(a(k, k)));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(value_of(a(i, k)));
      if (v > best) { best = v; p = i; }
    }
    if (best == 0.0) throw std::runtime_error("lu_solve: singular matrix");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      T m = a(i, k) / a(k, k);
      a(i, k) = m;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = a(i, j) - m * a(k, j);
      b[i] = b[i] - m * b[k];
    }
  }
  Vec<T> x(n, T(0));
  for (std::size_t i = n; i-- > 0;) {
    T acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc = acc - a(i, j) * x[j];
    x[i] = acc / a(i, i);
  }
  return x;
}

inline Mat<double> inverse(const Mat<double>& a) {
  const std::size_t n = a.rows();
  Mat<double> inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec<double> e(n, 0.0);
    e[j] = 1.0;
    Vec<double> col = lu_solve(a, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

// ---- symmetric eigensolver ------------------------------------------------

struct EigenSym {
  Vec<double> values;   // ascending
  Mat<double> vectors;  // column i pairs with values[i]
};

// Cyclic Jacobi iteration. Matrices here are at most 4x4, so a handful of
// sweeps reaches the 1e-12 off-diagonal tolerance.
inline EigenSym jacobi_eigh(Mat<double> a, double tol = 1e-12, int max_sweeps = 64) {
  const std::size_t n = a.rows();
  assert(a.cols() == n);
  Mat<double> v = Mat<double>::identity(n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= tol) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) <= tol * 1e-4) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  EigenSym r{Vec<double>(n), Mat<double>(n, n)};
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  for (std::size_t i = 0; i < n; ++i) {
    r.values[i] = a(order[i], order[i]);
    for (std::size_t k = 0; k < n; ++k) r.vectors(k, i) = v(k, order[i]);
  }
  return r;
}

inline double min_eigenvalue_sym(const Mat<double>& a) { return jacobi_eigh(a).values[0]; }
inline double max_eigenvalue_sym(const Mat<double>& a) {
  const auto e = jacobi_eigh(a);
  return e.values[e.values.size() - 1];
}

// Spectral norm via the Jacobi solver on A^T A.
inline double spectral_norm(const Mat<double>& a) {
  Mat<double> ata = transpose(a) * a;
  const double lmax = std::max(0.0, max_eigenvalue_sym(ata));
  return std::sqrt(lmax);
}

inline double norm2(const Vec<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

template <class T>
double fro_norm_values(const Mat<T>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double x = value_of(a(i, j));
      s += x * x;
    }
  return std::sqrt(s);
}

inline Mat<double> values_of(const Mat<double>& m) { return m; }

}  // namespace nidapbc
