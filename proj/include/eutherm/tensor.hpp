#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <string>

#include "eutherm/errors.hpp"

namespace eutherm {

// Dense d x d tensors and length-d vectors, d in {1,2,3}. The dimension is a
// runtime property of a scene, not a template parameter, so the test suites
// can sweep d without recompiling.

class Vec {
 public:
  Vec() : d_(0), v_{} {}
  explicit Vec(int d) : d_(d), v_{} { assert(d >= 1 && d <= 3); }

  int dim() const { return d_; }
  double& operator[](int i) { return v_[static_cast<size_t>(i)]; }
  double operator[](int i) const { return v_[static_cast<size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < d_; ++i) v_[i] += o.v_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < d_; ++i) v_[i] -= o.v_[i];
    return *this;
  }
  Vec& operator*=(double c) {
    for (int i = 0; i < d_; ++i) v_[i] *= c;
    return *this;
  }

 private:
  int d_;
  std::array<double, 3> v_;
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double c, Vec a) { return a *= c; }

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

class Tensor2 {
 public:
  Tensor2() : d_(0), a_{} {}
  explicit Tensor2(int d) : d_(d), a_{} { assert(d >= 1 && d <= 3); }

  static Tensor2 identity(int d) {
    Tensor2 t(d);
    for (int i = 0; i < d; ++i) t(i, i) = 1.0;
    return t;
  }

  int dim() const { return d_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i * d_ + j)]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i * d_ + j)]; }

  Tensor2& operator+=(const Tensor2& o) {
    for (int k = 0; k < d_ * d_; ++k) a_[k] += o.a_[k];
    return *this;
  }
  Tensor2& operator-=(const Tensor2& o) {
    for (int k = 0; k < d_ * d_; ++k) a_[k] -= o.a_[k];
    return *this;
  }
  Tensor2& operator*=(double c) {
    for (int k = 0; k < d_ * d_; ++k) a_[k] *= c;
    return *this;
  }

 private:
  int d_;
  std::array<double, 9> a_;
};

inline Tensor2 operator+(Tensor2 a, const Tensor2& b) { return a += b; }
inline Tensor2 operator-(Tensor2 a, const Tensor2& b) { return a -= b; }
inline Tensor2 operator*(double c, Tensor2 a) { return a *= c; }

inline Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
  const int d = a.dim();
  Tensor2 c(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0;
      for (int k = 0; k < d; ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline Vec matvec(const Tensor2& a, const Vec& x) {
  const int d = a.dim();
  Vec y(d);
  for (int i = 0; i < d; ++i) {
    double s = 0;
    for (int j = 0; j < d; ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

inline Tensor2 outer(const Vec& a, const Vec& b) {
  const int d = a.dim();
  Tensor2 t(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t(i, j) = a[i] * b[j];
  return t;
}

inline Tensor2 transpose(const Tensor2& a) {
  const int d = a.dim();
  Tensor2 t(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t(i, j) = a(j, i);
  return t;
}

inline double trace(const Tensor2& a) {
  double s = 0;
  for (int i = 0; i < a.dim(); ++i) s += a(i, i);
  return s;
}

inline Tensor2 sym(const Tensor2& a) {
  const int d = a.dim();
  Tensor2 t(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t(i, j) = 0.5 * (a(i, j) + a(j, i));
  return t;
}

// dev(A) = A - (tr A / d) I
inline Tensor2 dev(const Tensor2& a) {
  const int d = a.dim();
  Tensor2 t = a;
  const double m = trace(a) / d;
  for (int i = 0; i < d; ++i) t(i, i) -= m;
  return t;
}

inline double ddot(const Tensor2& a, const Tensor2& b) {
  double s = 0;
  const int d = a.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += a(i, j) * b(i, j);
  return s;
}

inline double frob(const Tensor2& a) { return std::sqrt(ddot(a, a)); }

inline double det(const Tensor2& a) {
  switch (a.dim()) {
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    default:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  }
}

// Cofactor matrix: cof(A)_{ij} = d det(A) / d A_{ij}, so A cof(A)^T = det(A) I.
inline Tensor2 cof(const Tensor2& a) {
  const int d = a.dim();
  Tensor2 c(d);
  switch (d) {
    case 1:
      c(0, 0) = 1.0;
      break;
    case 2:
      c(0, 0) = a(1, 1);
      c(0, 1) = -a(1, 0);
      c(1, 0) = -a(0, 1);
      c(1, 1) = a(0, 0);
      break;
    default:
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
          const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
          c(i, j) = a(i1, j1) * a(i2, j2) - a(i1, j2) * a(i2, j1);
        }
      break;
  }
  return c;
}

inline double singular_tol(const Tensor2& a) {
  double nf = frob(a);
  double t = 1e-12;
  for (int k = 0; k < a.dim(); ++k) t *= nf;
  return t;
}

inline Tensor2 inv(const Tensor2& a) {
  const double j = det(a);
  if (std::abs(j) <= singular_tol(a))
    throw SingularTensor("inv: |det| = " + std::to_string(std::abs(j)) + " below tolerance");
  Tensor2 c = cof(a);
  Tensor2 r = transpose(c);
  r *= 1.0 / j;
  return r;
}

inline double max_abs(const Tensor2& a) {
  double m = 0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

}  // namespace eutherm
