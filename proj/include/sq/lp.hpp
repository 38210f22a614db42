#pragma once

// Dense two-phase simplex for the tiny linear programs that back the
// LP-defined oracles (V-polytope gauge, H-polytope support, projected
// H-polytope gauge). Sizes are desk scale: tens of rows, hundreds of columns.

#include "sq/linear.hpp"

namespace sq::lp {

// min c^T x subject to A x = b, x >= 0. Throws Error when the program is
// infeasible or unbounded.
double solve_standard_form(const Matrix& A, const Vector& b, const Vector& c);

// min ||lambda||_1 subject to generators^T lambda = x, where the generators
// are the rows of `generators`. This is the gauge of conv(+-g_i) at x, and
// the support function of {y : |<g_i, y>| <= 1} at x.
double min_l1_representation(const Matrix& generators, const Vector& x);

// min over u of ||a + M u||_inf.
double min_max_abs_affine(const Vector& a, const Matrix& M);

}  // namespace sq::lp
