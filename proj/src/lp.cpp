#include "sq/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sq::lp {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr int kBlandAfter = 50;

class Tableau {
 public:
  Tableau(const Matrix& A, const Vector& b)
      : m_(static_cast<int>(A.rows())), n_(static_cast<int>(A.cols())),
        t_(Matrix::Zero(m_ + 1, n_ + m_ + 1)), basis_(m_) {
    for (int i = 0; i < m_; ++i) {
      const double sign = b(i) < 0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * A.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, rhs()) = sign * b(i);
      basis_[i] = n_ + i;
    }
  }

  int rhs() const { return n_ + m_; }

  double phase_one() {
    for (int j = 0; j < n_; ++j) t_(m_, j) = -t_.col(j).head(m_).sum();
    for (int j = n_; j < n_ + m_; ++j) t_(m_, j) = 0.0;
    t_(m_, rhs()) = -t_.col(rhs()).head(m_).sum();
    iterate(n_ + m_);
    return -t_(m_, rhs());
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      int best = -1;
      double best_abs = kPivotTol;
      for (int j = 0; j < n_; ++j) {
        if (std::abs(t_(i, j)) > best_abs) {
          best_abs = std::abs(t_(i, j));
          best = j;
        }
      }
      if (best >= 0) pivot(i, best);
    }
  }

  double phase_two(const Vector& c) {
    for (int j = 0; j < n_ + m_; ++j) t_(m_, j) = j < n_ ? c(j) : 0.0;
    t_(m_, rhs()) = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double cb = basis_[i] < n_ ? c(basis_[i]) : 0.0;
      if (cb != 0.0) t_.row(m_) -= cb * t_.row(i);
    }
    if (!iterate(n_)) throw Error("linear program is unbounded");
    return -t_(m_, rhs());
  }

 private:
  // Returns false when unbounded. Only columns below `limit` may enter.
  bool iterate(int limit) {
    int degenerate = 0;
    for (int guard = 0; guard < 100000; ++guard) {
      const bool bland = degenerate > kBlandAfter;
      int enter = -1;
      double most = -kPivotTol;
      for (int j = 0; j < limit; ++j) {
        const double rc = t_(m_, j);
        if (rc < most) {
          enter = j;
          if (bland) break;
          most = rc;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        const double a = t_(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = t_(i, rhs()) / a;
        if (ratio < best_ratio - 1e-14 ||
            (ratio <= best_ratio + 1e-14 && leave >= 0 && basis_[i] < basis_[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      degenerate = best_ratio <= 1e-14 ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
    throw Error("simplex iteration limit reached");
  }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = c;
  }

  int m_;
  int n_;
  Matrix t_;
  std::vector<int> basis_;
};

}  // namespace

double solve_standard_form(const Matrix& A, const Vector& b, const Vector& c) {
  if (A.rows() != b.size() || A.cols() != c.size())
    throw DimensionMismatch("solve_standard_form: inconsistent shapes");
  Tableau tab(A, b);
  const double infeasibility = tab.phase_one();
  if (infeasibility > 1e-9 * (1.0 + b.cwiseAbs().sum()))
    throw Error("linear program is infeasible");
  tab.drive_out_artificials();
  return tab.phase_two(c);
}

double min_l1_representation(const Matrix& generators, const Vector& x) {
  if (generators.cols() != x.size()) throw DimensionMismatch("min_l1_representation");
  const auto m = generators.rows();
  const auto n = generators.cols();
  Matrix A(n, 2 * m);
  A.leftCols(m) = generators.transpose();
  A.rightCols(m) = -generators.transpose();
  return solve_standard_form(A, x, Vector::Ones(2 * m));
}

double min_max_abs_affine(const Vector& a, const Matrix& M) {
  if (M.rows() != a.size()) throw DimensionMismatch("min_max_abs_affine");
  if (M.cols() == 0) return a.cwiseAbs().maxCoeff();
  // Dual form: max a^T lambda  s.t.  M^T lambda = 0, ||lambda||_1 <= 1.
  const auto m = M.rows();
  const auto k = M.cols();
  Matrix A = Matrix::Zero(k + 1, 2 * m + 1);
  A.block(0, 0, k, m) = M.transpose();
  A.block(0, m, k, m) = -M.transpose();
  A.row(k).setOnes();
  Vector b = Vector::Zero(k + 1);
  b(k) = 1.0;
  Vector c(2 * m + 1);
  c.head(m) = -a;
  c.segment(m, m) = a;
  c(2 * m) = 0.0;
  return -solve_standard_form(A, b, c);
}

}  // namespace sq::lp
