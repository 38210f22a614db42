#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "sq/bodies.hpp"

namespace sq {
namespace {

constexpr double kFeasTol = 1e-8;
constexpr double kMaxEnumeration = 4e6;

double binomial(int m, int n) {
  double r = 1.0;
  for (int i = 1; i <= n; ++i) r = r * (m - n + i) / i;
  return r;
}

// Flip sign so the first clearly nonzero coordinate is positive.
Vector canonical(Vector v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-9) {
      if (v(i) < 0) v = -v;
      break;
    }
  }
  return v;
}

int affine_rank(const std::vector<Vector>& pts) {
  if (pts.size() <= 1) return 0;
  Matrix m(pts.front().size(), static_cast<Eigen::Index>(pts.size() - 1));
  for (std::size_t i = 1; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i - 1)) = pts[i] - pts[0];
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  qr.setThreshold(1e-9);
  return static_cast<int>(qr.rank());
}

class FaceVolume {
 public:
  FaceVolume(Matrix points, std::vector<std::vector<int>> facets)
      : points_(std::move(points)), facets_(std::move(facets)) {}

  double volume(const std::vector<int>& face, int k, const Vector& apex) {
    if (k == 0) return 1.0;
    if (k == 1) {
      double len = 0.0;
      for (int a : face)
        for (int b : face) len = std::max(len, (points_.row(a) - points_.row(b)).norm());
      return len;
    }
    std::map<std::vector<int>, bool> seen;
    double total = 0.0;
    for (const auto& facet : facets_) {
      std::vector<int> sub;
      std::set_intersection(face.begin(), face.end(), facet.begin(), facet.end(), std::back_inserter(sub));
      if (sub.size() < static_cast<std::size_t>(k) || sub.size() == face.size()) continue;
      if (seen.count(sub)) continue;
      seen[sub] = true;
      if (affine_rank(rows(sub)) != k - 1) continue;
      total += distance_to_hull(apex, sub, k - 1) * memo_volume(sub, k - 1) / k;
    }
    return total;
  }

 private:
  std::vector<Vector> rows(const std::vector<int>& idx) const {
    std::vector<Vector> out;
    for (int i : idx) out.emplace_back(points_.row(i).transpose());
    return out;
  }

  Vector centroid(const std::vector<int>& idx) const {
    Vector c = Vector::Zero(points_.cols());
    for (int i : idx) c += points_.row(i).transpose();
    return c / static_cast<double>(idx.size());
  }

  double distance_to_hull(const Vector& x, const std::vector<int>& idx, int k) const {
    const Vector base = points_.row(idx.front()).transpose();
    Vector r = x - base;
    if (k == 0) return r.norm();
    Matrix m(points_.cols(), static_cast<Eigen::Index>(idx.size() - 1));
    for (std::size_t i = 1; i < idx.size(); ++i)
      m.col(static_cast<Eigen::Index>(i - 1)) = points_.row(idx[i]).transpose() - base;
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    qr.setThreshold(1e-9);
    const Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), qr.rank());
    return (r - q * (q.transpose() * r)).norm();
  }

  double memo_volume(const std::vector<int>& face, int k) {
    auto it = memo_.find(face);
    if (it != memo_.end()) return it->second;
    const double v = volume(face, k, centroid(face));
    memo_[face] = v;
    return v;
  }

  Matrix points_;
  std::vector<std::vector<int>> facets_;
  std::map<std::vector<int>, double> memo_;
};

}  // namespace

Matrix halfspace_to_vertices(const Matrix& normals) {
  const int m = static_cast<int>(normals.rows());
  const int n = static_cast<int>(normals.cols());
  if (m < n) throw Degenerate("halfspace_to_vertices: normals do not span");
  if (binomial(m, n) * std::ldexp(1.0, n - 1) > kMaxEnumeration)
    throw UnsupportedRepresentation("halfspace_to_vertices: enumeration too large");
  const double scale = normals.rowwise().norm().maxCoeff();

  std::vector<Vector> found;
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  const long patterns = 1L << (n - 1);
  for (;;) {
    Matrix sub(n, n);
    for (int i = 0; i < n; ++i) sub.row(i) = normals.row(pick[i]);
    Eigen::FullPivLU<Matrix> lu(sub);
    lu.setThreshold(1e-10);
    if (lu.isInvertible()) {
      const Matrix inv = lu.inverse();
      for (long mask = 0; mask < patterns; ++mask) {
        Vector sigma(n);
        sigma(0) = 1.0;
        for (int j = 1; j < n; ++j) sigma(j) = (mask >> (j - 1)) & 1 ? -1.0 : 1.0;
        const Vector x = inv * sigma;
        if ((normals * x).cwiseAbs().maxCoeff() > 1.0 + kFeasTol) continue;
        const Vector c = canonical(x);
        const double tol = kFeasTol * std::max(1.0, c.norm()) * std::max(1.0, scale);
        const bool dup = std::any_of(found.begin(), found.end(),
                                     [&](const Vector& f) { return (f - c).cwiseAbs().maxCoeff() <= tol; });
        if (!dup) found.push_back(c);
      }
    }
    int i = n - 1;
    while (i >= 0 && pick[i] == m - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  Matrix out(static_cast<Eigen::Index>(found.size()), n);
  for (std::size_t i = 0; i < found.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = found[i];
  return out;
}

double symmetric_polytope_volume(const Matrix& vertices, const Matrix& facet_normals) {
  const auto v = vertices.rows();
  const auto n = vertices.cols();
  Matrix points(2 * v, n);
  points.topRows(v) = vertices;
  points.bottomRows(v) = -vertices;
  std::vector<std::vector<int>> facets;
  for (Eigen::Index f = 0; f < facet_normals.rows(); ++f) {
    for (double sign : {1.0, -1.0}) {
      const Vector a = sign * facet_normals.row(f).transpose();
      std::vector<int> on;
      for (Eigen::Index i = 0; i < 2 * v; ++i)
        if (std::abs(points.row(i).dot(a) - 1.0) <= 1e-7) on.push_back(static_cast<int>(i));
      facets.push_back(std::move(on));
    }
  }
  std::vector<int> all(static_cast<std::size_t>(2 * v));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  FaceVolume fv(points, facets);
  return fv.volume(all, static_cast<int>(n), Vector::Zero(n));
}

}  // namespace sq
