#pragma once

// Small dense linear algebra: seeded random streams, orthonormal bases,
// Haar-random subspaces and uniform sphere samples. Everything here is
// templated on the scalar type; the rest of the library uses double.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sq/errors.hpp"

namespace sq {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

inline constexpr double kOrthonormalTol = 1e-10;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// A reproducible random stream keyed by (seed, stream_id). Child streams
// obtained with split() depend only on the key and the child index, never
// on how many numbers the parent has drawn, so chunked Monte Carlo loops are
// deterministic regardless of scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id), engine_(mix(seed, stream_id)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  RngStream split(std::uint64_t child) const {
    return RngStream(seed_, splitmix64(stream_id_ * 0x2545F4914F6CDD1DULL + child + 1));
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t next_u64() { return engine_(); }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t id) {
    return splitmix64(splitmix64(seed) ^ (id * 0xD1B54A32D192ED03ULL));
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Orthonormal basis of a linear subspace, stored as the columns of an
// ambient_dim x d matrix.
template <typename Scalar>
class BasicSubspace {
 public:
  BasicSubspace() = default;

  // Takes ownership of an already-orthonormal basis. Use orthonormalize()
  // for arbitrary spanning sets.
  explicit BasicSubspace(MatrixX<Scalar> basis) : basis_(std::move(basis)) {
    if (basis_.cols() < 1 || basis_.cols() > basis_.rows())
      throw InvalidArgument("subspace basis must have 1 <= d <= ambient_dim columns");
    const Scalar dev = (basis_.transpose() * basis_ -
                        MatrixX<Scalar>::Identity(basis_.cols(), basis_.cols()))
                           .cwiseAbs()
                           .maxCoeff();
    if (!(dev <= Scalar(kOrthonormalTol)))
      throw InvalidArgument("subspace basis is not orthonormal");
  }

  static BasicSubspace full(int n) { return BasicSubspace(MatrixX<Scalar>::Identity(n, n)); }

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const MatrixX<Scalar>& basis() const { return basis_; }

  VectorX<Scalar> embed(const VectorX<Scalar>& z) const { return basis_ * z; }
  VectorX<Scalar> coordinates(const VectorX<Scalar>& x) const { return basis_.transpose() * x; }
  VectorX<Scalar> project(const VectorX<Scalar>& x) const {
    return basis_ * (basis_.transpose() * x);
  }
  Scalar residual(const VectorX<Scalar>& x) const { return (x - project(x)).norm(); }

 private:
  MatrixX<Scalar> basis_;
};

using Subspace = BasicSubspace<double>;

// Two-pass modified Gram-Schmidt on the columns of `vectors`.
template <typename Scalar>
BasicSubspace<Scalar> orthonormalize(const MatrixX<Scalar>& vectors) {
  const auto n = vectors.rows();
  const auto k = vectors.cols();
  if (k == 0) throw InvalidArgument("orthonormalize: empty input");
  if (k > n) throw RankDeficient("orthonormalize: more vectors than dimensions");
  MatrixX<Scalar> q = vectors;
  for (Eigen::Index j = 0; j < k; ++j) {
    const Scalar original = vectors.col(j).norm();
    if (!(original > Scalar(0)))
      throw RankDeficient("orthonormalize: zero vector at position " + std::to_string(j));
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    const Scalar rest = q.col(j).norm();
    if (rest <= Scalar(kOrthonormalTol) * original)
      throw RankDeficient("orthonormalize: numerical rank below " + std::to_string(k));
    q.col(j) /= rest;
  }
  return BasicSubspace<Scalar>(std::move(q));
}

template <typename Scalar>
BasicSubspace<Scalar> orthonormalize(std::span<const VectorX<Scalar>> vectors) {
  if (vectors.empty()) throw InvalidArgument("orthonormalize: empty input");
  const auto n = vectors.front().size();
  MatrixX<Scalar> m(n, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != n) throw DimensionMismatch("orthonormalize: mixed dimensions");
    m.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  return orthonormalize<Scalar>(m);
}

inline Subspace orthonormalize(const std::vector<Vector>& vectors) {
  return orthonormalize<double>(std::span<const Vector>(vectors));
}

// Orthonormal basis of the orthogonal complement of span(columns) in
// R^rows. May have zero columns.
template <typename Scalar>
MatrixX<Scalar> orthogonal_complement(const MatrixX<Scalar>& columns) {
  const auto n = columns.rows();
  const auto d = columns.cols();
  if (d == 0) return MatrixX<Scalar>::Identity(n, n);
  Eigen::HouseholderQR<MatrixX<Scalar>> qr(columns);
  MatrixX<Scalar> q = qr.householderQ() * MatrixX<Scalar>::Identity(n, n);
  return q.rightCols(n - d);
}

template <typename Scalar = double>
VectorX<Scalar> gaussian_vector(int dim, RngStream& rng) {
  VectorX<Scalar> g(dim);
  for (int i = 0; i < dim; ++i) g(i) = static_cast<Scalar>(rng.normal());
  return g;
}

// Uniform point on the unit sphere S^{dim-1}.
template <typename Scalar = double>
VectorX<Scalar> sphere_sample(int dim, RngStream& rng) {
  if (dim < 1) throw InvalidArgument("sphere_sample: dim must be >= 1");
  for (;;) {
    VectorX<Scalar> g = gaussian_vector<Scalar>(dim, rng);
    const Scalar norm = g.norm();
    if (norm > Scalar(1e-300)) return g / norm;
  }
}

// Haar-random d-dimensional subspace: orthonormalized Gaussian columns.
template <typename Scalar = double>
BasicSubspace<Scalar> haar_subspace(int ambient_dim, int d, RngStream& rng) {
  if (d < 1 || d > ambient_dim) throw InvalidArgument("haar_subspace: need 1 <= d <= ambient_dim");
  for (;;) {
    MatrixX<Scalar> g(ambient_dim, d);
    for (int j = 0; j < d; ++j) g.col(j) = gaussian_vector<Scalar>(ambient_dim, rng);
    try {
      return orthonormalize<Scalar>(g);
    } catch (const RankDeficient&) {
      // probability zero; redraw
    }
  }
}

// Haar-random orthogonal matrix.
template <typename Scalar = double>
MatrixX<Scalar> random_rotation(int n, RngStream& rng) {
  return haar_subspace<Scalar>(n, n, rng).basis();
}

}  // namespace sq
