#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpkernel/errors.hpp"

namespace cpkernel {

/// Strictly increasing time grid 0 = t_0 < t_1 < ... < t_N.  Immutable after
/// construction; validation uses exact comparisons (a degenerate step is an
/// input error, not noise).
class Mesh {
public:
  explicit Mesh(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) {
      throw MeshError(MeshError::Kind::TooShort, points_.size(),
                      "mesh needs at least two points (N >= 1)");
    }
    if (!(points_[0] == 0.0)) {
      throw MeshError(MeshError::Kind::NonzeroOrigin, 0, "mesh must start at t_0 = 0");
    }
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (!(points_[i] > points_[i - 1]) || !std::isfinite(points_[i])) {
        throw MeshError(MeshError::Kind::NonMonotone, i,
                        "mesh points must be finite and strictly increasing (index " +
                            std::to_string(i) + ")");
      }
    }
  }

  std::size_t num_steps() const { return points_.size() - 1; }
  double horizon() const { return points_.back(); }
  double t(std::size_t i) const { return points_[i]; }
  double step(std::size_t n) const { return points_[n] - points_[n - 1]; }  // tau_n, n >= 1
  std::span<const double> points() const { return points_; }

private:
  std::vector<double> points_;
};

/// Graded grid t_k = T (k/N)^r; r = 1 is the uniform mesh.
inline Mesh make_graded_mesh(double T, std::size_t N, double r) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("graded mesh: T must be positive");
  if (N < 1) throw DomainError("graded mesh: N must be >= 1");
  if (!(r >= 1.0) || !std::isfinite(r)) throw DomainError("graded mesh: r must be >= 1");
  std::vector<double> pts(N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    pts[k] = (k == N) ? T : T * std::pow(double(k) / double(N), r);
  }
  return Mesh(std::move(pts));
}

inline Mesh validate_mesh(std::vector<double> points) { return Mesh(std::move(points)); }

/// Step sizes tau_n = t_n - t_{n-1}, n = 1..N.
inline std::vector<double> steps(const Mesh& mesh) {
  std::vector<double> tau(mesh.num_steps());
  for (std::size_t n = 1; n <= mesh.num_steps(); ++n) tau[n - 1] = mesh.step(n);
  return tau;
}

}  // namespace cpkernel
