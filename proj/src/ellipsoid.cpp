#include "sq/ellipsoid.hpp"

#include <cmath>

namespace sq {
namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

Ellipsoid::Ellipsoid(Matrix form) {
  if (form.rows() != form.cols() || form.rows() < 1)
    throw InvalidArgument("ellipsoid form must be a nonempty square matrix");
  if (!form.allFinite()) throw InvalidArgument("ellipsoid form has non-finite entries");
  const double scale = std::max(1.0, form.cwiseAbs().maxCoeff());
  if ((form - form.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("ellipsoid form is not symmetric");
  form_ = symmetrized(form);
  Eigen::LLT<Matrix> llt(form_);
  if (llt.info() != Eigen::Success) throw Degenerate("ellipsoid form is not positive definite");
  const Matrix lower = llt.matrixL();
  if (lower.diagonal().minCoeff() <= 0.0) throw Degenerate("ellipsoid form is not positive definite");
  normalizer_ = lower.transpose();
  const auto n = form_.rows();
  normalizer_inverse_ =
      normalizer_.triangularView<Eigen::Upper>().solve(Matrix::Identity(n, n));
  inverse_form_ = symmetrized(normalizer_inverse_ * normalizer_inverse_.transpose());
  log_det_ = 2.0 * lower.diagonal().array().log().sum();
}

Ellipsoid Ellipsoid::ball(int n, double radius) {
  return Ellipsoid(Matrix::Identity(n, n) / (radius * radius));
}

double Ellipsoid::gauge(const Vector& x) const {
  if (x.size() != dim()) throw DimensionMismatch("ellipsoid gauge");
  return (normalizer_ * x).norm();
}

double Ellipsoid::support(const Vector& y) const {
  if (y.size() != dim()) throw DimensionMismatch("ellipsoid support");
  return (normalizer_inverse_.transpose() * y).norm();
}

Ellipsoid Ellipsoid::image(const Matrix& T) const {
  if (T.rows() != dim() || T.cols() != dim()) throw DimensionMismatch("ellipsoid image");
  Eigen::FullPivLU<Matrix> lu(T);
  if (!lu.isInvertible()) throw SingularMap("ellipsoid image under singular map");
  const Matrix tinv = lu.inverse();
  return Ellipsoid(symmetrized(tinv.transpose() * form_ * tinv));
}

Ellipsoid Ellipsoid::slice(const Matrix& basis) const {
  if (basis.rows() != dim()) throw DimensionMismatch("ellipsoid slice");
  return Ellipsoid(symmetrized(basis.transpose() * form_ * basis));
}

Ellipsoid Ellipsoid::project(const Matrix& basis) const {
  if (basis.rows() != dim()) throw DimensionMismatch("ellipsoid projection");
  const Matrix dual = symmetrized(basis.transpose() * inverse_form_ * basis);
  return Ellipsoid(Ellipsoid(dual).inverse_form());
}

}  // namespace sq
