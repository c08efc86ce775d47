// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fedban/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedban/error.hpp"

namespace fedban {
namespace {

void RequireSameDim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    Fail(ErrorCode::kDimensionMismatch,
         std::string(what) + ": " + std::to_string(a) + " vs " +
             std::to_string(b));
  }
}

// Sum of log pivots without calling log() per pivot: the running product is
// kept as mantissa * 2^exponent so it cannot overflow or underflow.
class LogProduct {
 public:
  void Multiply(double x) {
    mantissa_ *= x;
    int e = 0;
    mantissa_ = std::frexp(mantissa_, &e);
    exponent_ += e;
  }
  double Log() const {
    return std::log(mantissa_) + exponent_ * std::log(2.0);
  }

 private:
  double mantissa_ = 1.0;
  long exponent_ = 0;
};

}  // namespace

Vector& Vector::operator+=(const Vector& other) {
  RequireSameDim(dim(), other.dim(), "vector add");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += other.v_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  RequireSameDim(dim(), other.dim(), "vector subtract");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= other.v_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

double Vector::Dot(const Vector& other) const {
  RequireSameDim(dim(), other.dim(), "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) acc += v_[i] * other.v_[i];
  return acc;
}

double Vector::Norm() const { return std::sqrt(Dot(*this)); }

void Vector::SetZero() { std::fill(v_.begin(), v_.end(), 0.0); }

SymMatrix SymMatrix::Identity(std::size_t dim, double scale) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.a_[i * dim + i] = scale;
  return m;
}

SymMatrix SymMatrix::Diagonal(std::initializer_list<double> diag) {
  SymMatrix m(diag.size());
  std::size_t i = 0;
  for (double v : diag) {
    m.a_[i * m.dim_ + i] = v;
    ++i;
  }
  return m;
}

SymMatrix SymMatrix::FromRows(const std::vector<std::vector<double>>& rows) {
  const std::size_t d = rows.size();
  SymMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) {
    RequireSameDim(rows[i].size(), d, "matrix row");
    for (std::size_t j = 0; j < d; ++j) m.a_[i * d + j] = rows[i][j];
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (std::abs(m.a_[i * d + j] - m.a_[j * d + i]) > 1e-12) {
        Fail(ErrorCode::kDimensionMismatch,
             "matrix is not symmetric at (" + std::to_string(i) + ", " +
                 std::to_string(j) + ")");
      }
      m.a_[j * d + i] = m.a_[i * d + j];
    }
  }
  return m;
}

void SymMatrix::Set(std::size_t i, std::size_t j, double value) {
  a_[i * dim_ + j] = value;
  a_[j * dim_ + i] = value;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  RequireSameDim(dim_, other.dim_, "matrix add");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += other.a_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  RequireSameDim(dim_, other.dim_, "matrix subtract");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= other.a_[k];
  return *this;
}

void SymMatrix::AddOuter(const Vector& x, double scale) {
  RequireSameDim(dim_, x.dim(), "outer product");
  for (std::size_t i = 0; i < dim_; ++i) {
    const double xi = scale * x[i];
    for (std::size_t j = i; j < dim_; ++j) {
      const double v = a_[i * dim_ + j] + xi * x[j];
      a_[i * dim_ + j] = v;
      a_[j * dim_ + i] = v;
    }
  }
}

void SymMatrix::SetZero() { std::fill(a_.begin(), a_.end(), 0.0); }

bool SymMatrix::IsZero() const {
  return std::all_of(a_.begin(), a_.end(), [](double v) { return v == 0.0; });
}

Vector SymMatrix::Multiply(const Vector& x) const {
  RequireSameDim(dim_, x.dim(), "matrix-vector product");
  Vector out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) acc += a_[i * dim_ + j] * x[j];
    out[i] = acc;
  }
  return out;
}

Cholesky::Cholesky(const SymMatrix& m, double ridge)
    : dim_(m.dim()), l_(m.dim() * m.dim(), 0.0) {
  const std::size_t d = dim_;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m(i, j) + (i == j ? ridge : 0.0);
      for (std::size_t k = 0; k < j; ++k) s -= l_[i * d + k] * l_[j * d + k];
      if (i == j) {
        if (!(s > 0.0)) {
          Fail(ErrorCode::kNotPositiveDefinite,
               "pivot " + std::to_string(i) + " is " + std::to_string(s));
        }
        l_[i * d + i] = std::sqrt(s);
      } else {
        l_[i * d + j] = s / l_[j * d + j];
      }
    }
  }
}

double Cholesky::LogDet() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) acc += std::log(l_[i * dim_ + i]);
  return 2.0 * acc;
}

Vector Cholesky::Solve(const Vector& rhs) const {
  RequireSameDim(dim_, rhs.dim(), "solve");
  const std::size_t d = dim_;
  Vector y(d);
  for (std::size_t i = 0; i < d; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= l_[i * d + k] * y[k];
    y[i] = s / l_[i * d + i];
  }
  Vector x(d);
  for (std::size_t ii = d; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < d; ++k) s -= l_[k * d + ii] * x[k];
    x[ii] = s / l_[ii * d + ii];
  }
  return x;
}

double LogDet(const SymMatrix& m, double ridge) {
  return Cholesky(m, ridge).LogDet();
}

SymMatrix RankOneUpdate(const SymMatrix& m, const Vector& x) {
  SymMatrix out = m;
  out.AddOuter(x);
  return out;
}

Vector SolveSpd(const SymMatrix& m, double ridge, const Vector& rhs) {
  return Cholesky(m, ridge).Solve(rhs);
}

double MahalanobisNorm(const SymMatrix& m, double ridge, const Vector& x) {
  const Vector z = SolveSpd(m, ridge, x);
  return std::sqrt(std::max(0.0, x.Dot(z)));
}

double Determinant(const SymMatrix& m) {
  const std::size_t d = m.dim();
  if (d == 0) return 1.0;
  std::vector<double> a(m.entries().begin(), m.entries().end());
  double scale = 0.0;
  for (std::size_t i = 0; i < d; ++i) scale = std::max(scale, a[i * d + i]);
  if (scale <= 0.0) return 0.0;
  const double floor = 1e-12 * scale;
  double det = 1.0;
  // Symmetric elimination with diagonal pivoting (LDL^T on a PSD matrix).
  std::vector<bool> used(d, false);
  for (std::size_t step = 0; step < d; ++step) {
    std::size_t p = d;
    double best = -1.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (!used[i] && a[i * d + i] > best) {
        best = a[i * d + i];
        p = i;
      }
    }
    if (best <= floor) return 0.0;
    used[p] = true;
    det *= best;
    for (std::size_t i = 0; i < d; ++i) {
      if (used[i]) continue;
      const double f = a[i * d + p] / best;
      for (std::size_t j = 0; j < d; ++j) {
        if (!used[j]) a[i * d + j] -= f * a[p * d + j];
      }
    }
  }
  return det;
}

double LogDetInPlace(std::span<double> a, std::size_t d) {
  LogProduct prod;
  for (std::size_t j = 0; j < d; ++j) {
    double pivot = a[j * d + j];
    for (std::size_t k = 0; k < j; ++k) pivot -= a[j * d + k] * a[j * d + k];
    if (!(pivot > 0.0)) {
      Fail(ErrorCode::kNotPositiveDefinite,
           "pivot " + std::to_string(j) + " is " + std::to_string(pivot));
    }
    prod.Multiply(pivot);
    const double ljj = std::sqrt(pivot);
    a[j * d + j] = ljj;
    for (std::size_t i = j + 1; i < d; ++i) {
      double s = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * d + k] * a[j * d + k];
      a[i * d + j] = s / ljj;
    }
  }
  return prod.Log();
}

}  // namespace fedban
