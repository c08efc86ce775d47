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

#ifndef FEDBAN_LINALG_HPP_
#define FEDBAN_LINALG_HPP_

// Dense symmetric positive-(semi)definite matrix arithmetic. Every
// determinant in the system is taken on (matrix + ridge * I) through a
// Cholesky factorization and reported in log space.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fedban {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double fill = 0.0) : v_(dim, fill) {}
  Vector(std::initializer_list<double> values) : v_(values) {}
  explicit Vector(std::vector<double> values) : v_(std::move(values)) {}

  std::size_t dim() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }
  std::span<const double> values() const { return v_; }
  std::span<double> values() { return v_; }

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double s);

  double Dot(const Vector& other) const;
  double Norm() const;
  void SetZero();

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> v_;
};

// Row-major storage of a symmetric d x d matrix. Mutators keep the two
// triangles identical bit for bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {}

  static SymMatrix Zero(std::size_t dim) { return SymMatrix(dim); }
  static SymMatrix Identity(std::size_t dim, double scale = 1.0);
  static SymMatrix Diagonal(std::initializer_list<double> diag);
  // Throws DimensionMismatch for non-square input and for asymmetry beyond
  // 1e-12 absolute.
  static SymMatrix FromRows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * dim_ + j];
  }
  std::span<const double> entries() const { return a_; }

  // Writes both (i, j) and (j, i).
  void Set(std::size_t i, std::size_t j, double value);

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  // In-place m += scale * x x^T (upper triangle computed, then mirrored).
  void AddOuter(const Vector& x, double scale = 1.0);
  void SetZero();
  bool IsZero() const;

  Vector Multiply(const Vector& x) const;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> a_;
};

// Cholesky factor of (m + ridge * I). Throws NotPositiveDefinite when a
// pivot is not strictly positive.
class Cholesky {
 public:
  Cholesky(const SymMatrix& m, double ridge);

  std::size_t dim() const { return dim_; }
  double LogDet() const;
  Vector Solve(const Vector& rhs) const;

 private:
  std::size_t dim_;
  std::vector<double> l_;  // lower triangle, row-major
};

double LogDet(const SymMatrix& m, double ridge);
SymMatrix RankOneUpdate(const SymMatrix& m, const Vector& x);
Vector SolveSpd(const SymMatrix& m, double ridge, const Vector& rhs);
double MahalanobisNorm(const SymMatrix& m, double ridge, const Vector& x);

// Raw determinant of a PSD matrix with no ridge. Numerically rank-deficient
// input (a pivot below 1e-12 of the largest diagonal entry) yields exactly 0.
double Determinant(const SymMatrix& m);

// log det of the d x d SPD matrix stored row-major in `scratch`; the buffer
// is overwritten. Hot-path variant used by coverage evaluation.
double LogDetInPlace(std::span<double> scratch, std::size_t dim);

}  // namespace fedban

#endif  // FEDBAN_LINALG_HPP_
