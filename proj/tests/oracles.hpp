#pragma once

// Independent reference values. Nothing here calls into the library's
// numeric routines.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace oracle {

// Omega_k by the recursion Omega_k = 2 pi Omega_{k-2} / k.
inline double omega(int k) {
  double a = 1.0, b = 2.0;  // Omega_0, Omega_1
  if (k == 0) return a;
  for (int j = 2; j <= k; ++j) {
    const double c = 2.0 * std::numbers::pi * a / j;
    a = b;
    b = c;
  }
  return b;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline double cube_volume(int n) { return std::pow(2.0, n); }
inline double cross_volume(int n) { return std::pow(2.0, n) / factorial(n); }
inline double lp_ball_volume(int n, double p) {
  return std::pow(2.0 * std::tgamma(1.0 + 1.0 / p), n) / std::tgamma(1.0 + n / p);
}

// f(n) = 2 Γ((n+3)/2) (n-2)! n! / (√π Γ((n+2)/2) (2n-1)!) by direct tgamma.
inline double f(int n) {
  return 2.0 * std::tgamma((n + 3) / 2.0) * factorial(n - 2) * factorial(n) /
         (std::sqrt(std::numbers::pi) * std::tgamma((n + 2) / 2.0) * factorial(2 * n - 1));
}

// (n-1)! n! / (2n)! as a running product of k / (n + k).
inline double beta(int n) {
  double b = 1.0 / n;
  for (int k = 1; k <= n; ++k) b *= static_cast<double>(k) / (n + k);
  return b;
}

// Exact check that (2 r_j)^{2/3} = r_{j-1} for r_j = 4 * 2^{(3/2)^j}:
// compares the base-2 exponents as fractions.
inline bool bound_recursion_exact(int j) {
  std::int64_t p2 = 1, p3 = 1;
  for (int i = 0; i < j; ++i) {
    p2 *= 2;
    p3 *= 3;
  }
  // log2(2 r_j) = 3 + 3^j / 2^j; times 2/3 = (2 * 2^j + 2 * 3^{j-1}) / 2^j.
  const std::int64_t lhs_num = 2 * (3 * p2 + p3);
  const std::int64_t lhs_den = 3 * p2;
  // log2(r_{j-1}) = 2 + 3^{j-1} / 2^{j-1}.
  const std::int64_t rhs_num = 2 * (p2 / 2) + p3 / 3;
  const std::int64_t rhs_den = p2 / 2;
  return lhs_num * rhs_den == rhs_num * lhs_den;
}

}  // namespace oracle
