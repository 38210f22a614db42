#include <doctest.h>

#include <set>

#include "sq/linear.hpp"
#include "sq/lp.hpp"
#include "sq/parallel.hpp"

using namespace sq;

TEST_CASE("orthonormalize examples") {
  const auto s = orthonormalize(std::vector<Vector>{Vector{{1.0, 0.0, 0.0}}, Vector{{1.0, 1.0, 0.0}}});
  CHECK((s.basis().col(0) - Vector{{1.0, 0.0, 0.0}}).norm() < 1e-12);
  CHECK((s.basis().col(1) - Vector{{0.0, 1.0, 0.0}}).norm() < 1e-12);

  const auto t = orthonormalize(std::vector<Vector>{Vector{{0.0, 2.0}}});
  CHECK((t.basis().col(0) - Vector{{0.0, 1.0}}).norm() < 1e-12);

  CHECK_THROWS_AS(orthonormalize(std::vector<Vector>{Vector{{1.0, 1.0}}, Vector{{2.0, 2.0}}}), RankDeficient);
}

TEST_CASE("orthonormalize is idempotent") {
  RngStream rng(1, 0);
  const auto w = haar_subspace(6, 4, rng);
  const auto again = orthonormalize<double>(w.basis());
  CHECK((again.basis() - w.basis()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("orthonormalize works in single precision") {
  Eigen::MatrixXf m(3, 2);
  m << 1, 1, 0, 1, 0, 0;
  const auto s = orthonormalize<float>(m);
  CHECK((s.basis().transpose() * s.basis() - Eigen::MatrixXf::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6f);
}

TEST_CASE("subspace rejects non-orthonormal bases") {
  Matrix b(2, 1);
  b << 1.0, 1.0;
  CHECK_THROWS_AS(Subspace{b}, InvalidArgument);
}

TEST_CASE("haar subspaces") {
  RngStream rng(7, 3);
  const auto w = haar_subspace(3, 2, rng);
  CHECK((w.basis().transpose() * w.basis() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);

  const auto full = haar_subspace(3, 3, rng);
  const Vector v{{0.3, -1.2, 2.0}};
  CHECK(full.residual(v) <= 1e-10);

  CHECK_THROWS_AS(haar_subspace(3, 4, rng), InvalidArgument);
}

TEST_CASE("haar subspace law is rotation invariant") {
  RngStream rot_rng(11, 0);
  const Matrix R = random_rotation(4, rot_rng);
  RngStream a(12, 0), b(12, 1);
  const int draws = 10000;
  double sa = 0, sa2 = 0, sb = 0, sb2 = 0;
  for (int i = 0; i < draws; ++i) {
    const double x = haar_subspace(4, 2, a).basis()(0, 0);
    const double y = (R * haar_subspace(4, 2, b).basis())(0, 0);
    sa += x * x;
    sa2 += x * x * x * x;
    sb += y * y;
    sb2 += y * y * y * y;
  }
  const double ma = sa / draws, mb = sb / draws;
  const double va = (sa2 / draws - ma * ma) / draws, vb = (sb2 / draws - mb * mb) / draws;
  CHECK(std::abs(ma - mb) <= 3.0 * std::sqrt(va + vb));
}

TEST_CASE("sphere samples") {
  RngStream rng(5, 0);
  for (int i = 0; i < 100; ++i) CHECK(std::abs(sphere_sample(5, rng).norm() - 1.0) <= 1e-12);

  for (int n : {2, 3, 6}) {
    const int draws = 100000;
    double s = 0, s2 = 0, cross = 0, cross2 = 0;
    for (int i = 0; i < draws; ++i) {
      const Vector x = sphere_sample(n, rng);
      s += x(0) * x(0);
      s2 += std::pow(x(0), 4);
      cross += x(0) * x(1);
      cross2 += std::pow(x(0) * x(1), 2);
    }
    const double mean = s / draws;
    const double se = std::sqrt((s2 / draws - mean * mean) / draws);
    CHECK(std::abs(mean - 1.0 / n) <= 3.0 * se);
    const double cm = cross / draws;
    CHECK(std::abs(cm) <= 3.0 * std::sqrt((cross2 / draws - cm * cm) / draws));
  }

  int plus = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const Vector x = sphere_sample(1, rng);
    CHECK(std::abs(std::abs(x(0)) - 1.0) == 0.0);
    plus += x(0) > 0;
  }
  CHECK(std::abs(plus / double(draws) - 0.5) <= 3.0 * std::sqrt(0.25 / draws));
}

TEST_CASE("rng streams are reproducible and split by key") {
  RngStream a(42, 9), b(42, 9);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  const RngStream parent(42, 9);
  RngStream c1 = parent.split(3), c2 = RngStream(42, 9).split(3), c3 = parent.split(4);
  CHECK(c1.next_u64() == c2.next_u64());
  CHECK(RngStream(42, 9).split(3).next_u64() != c3.next_u64());
}

TEST_CASE("orthogonal complement") {
  Matrix p(3, 1);
  p << 1.0, 2.0, 2.0;
  const Matrix z = orthogonal_complement<double>(p);
  CHECK(z.cols() == 2);
  CHECK((z.transpose() * p).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((z.transpose() * z - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("linear programs") {
  // min x1 + x2 s.t. x1 + 2 x2 = 4, x >= 0  ->  2 at x = (0, 2).
  Matrix A(1, 2);
  A << 1.0, 2.0;
  CHECK(lp::solve_standard_form(A, Vector{{4.0}}, Vector{{1.0, 1.0}}) == doctest::Approx(2.0).epsilon(1e-12));

  // l1 representation over +-e1, +-e2 is the l1 norm.
  CHECK(lp::min_l1_representation(Matrix::Identity(2, 2), Vector{{0.3, -0.4}}) == doctest::Approx(0.7).epsilon(1e-12));

  // min_t max |a + M t| with a = (1, 1), M = (1, -1)^T: t = 0 gives 1.
  Matrix M(2, 1);
  M << 1.0, -1.0;
  CHECK(lp::min_max_abs_affine(Vector{{1.0, 1.0}}, M) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chunked loops visit every index once") {
  std::vector<int> hits(10000, 0);
  for_each_chunk(10000, 333, [&](long, long begin, long end) {
    for (long i = begin; i < end; ++i) hits[static_cast<std::size_t>(i)] += 1;
  });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS(for_each_chunk(100, 10, [](long c, long, long) {
    if (c == 3) throw std::runtime_error("boom");
  }));
}
