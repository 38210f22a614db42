#pragma once

#include "sq/linear.hpp"

namespace sq {

// Centered ellipsoid {x : x^T Q x <= 1} with Q symmetric positive definite.
class Ellipsoid {
 public:
  Ellipsoid() : Ellipsoid(Matrix::Identity(1, 1)) {}
  explicit Ellipsoid(Matrix form);

  static Ellipsoid unit_ball(int n) { return Ellipsoid(Matrix::Identity(n, n)); }
  static Ellipsoid ball(int n, double radius);

  int dim() const { return static_cast<int>(form_.rows()); }
  const Matrix& form() const { return form_; }
  const Matrix& inverse_form() const { return inverse_form_; }

  double gauge(const Vector& x) const;
  double support(const Vector& y) const;

  // R with R^T R = Q: maps this ellipsoid onto the Euclidean unit ball.
  const Matrix& normalizer() const { return normalizer_; }
  const Matrix& normalizer_inverse() const { return normalizer_inverse_; }

  // log det Q; Vol E = Omega_n * exp(-log_det/2).
  double log_det() const { return log_det_; }

  Ellipsoid polar() const { return Ellipsoid(inverse_form_); }
  Ellipsoid scaled(double t) const { return Ellipsoid(form_ / (t * t)); }
  Ellipsoid image(const Matrix& T) const;
  // Intersection with span(B), B orthonormal columns, in B-coordinates.
  Ellipsoid slice(const Matrix& basis) const;
  // Orthogonal projection onto span(B), in B-coordinates.
  Ellipsoid project(const Matrix& basis) const;

 private:
  Matrix form_;
  Matrix inverse_form_;
  Matrix normalizer_;
  Matrix normalizer_inverse_;
  double log_det_ = 0.0;
};

}  // namespace sq
