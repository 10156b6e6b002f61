#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "freqinv/common.hpp"

namespace freqinv {

/// Uniform node grid over the cube (-half_width, half_width)^3.
///
/// Node (i, j, l) sits at (-A + i*step, -A + j*step, -A + l*step). The linear
/// index runs x1 fastest, then x2, then x3.
class Grid3 {
 public:
  Grid3(double half_width, double step);

  double half_width() const { return half_width_; }
  double step() const { return step_; }
  int nodes_per_axis() const { return n_; }
  std::size_t size() const {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_) *
           static_cast<std::size_t>(n_);
  }

  std::size_t index(int i, int j, int l) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n_) *
               (static_cast<std::size_t>(j) +
                static_cast<std::size_t>(n_) * static_cast<std::size_t>(l));
  }
  std::array<int, 3> ijk(std::size_t idx) const {
    const auto n = static_cast<std::size_t>(n_);
    return {static_cast<int>(idx % n), static_cast<int>((idx / n) % n),
            static_cast<int>(idx / (n * n))};
  }
  double coord(int i) const { return -half_width_ + i * step_; }
  Point point(std::size_t idx) const {
    const auto [i, j, l] = ijk(idx);
    return {coord(i), coord(j), coord(l)};
  }
  bool contains(int i, int j, int l) const {
    return i >= 0 && j >= 0 && l >= 0 && i < n_ && j < n_ && l < n_;
  }
  bool on_boundary(int i, int j, int l) const {
    return i == 0 || j == 0 || l == 0 || i == n_ - 1 || j == n_ - 1 ||
           l == n_ - 1;
  }
  bool on_boundary(std::size_t idx) const {
    const auto [i, j, l] = ijk(idx);
    return on_boundary(i, j, l);
  }

  /// Nearest node index along one axis, or nullopt if outside the closed cube
  /// by more than half a step.
  std::optional<int> nearest_axis_index(double x) const;
  std::optional<std::size_t> nearest_node(const Point& x) const;

  /// Node index in this grid of a node located at `x`, if one coincides with
  /// it to within 1e-9 * step.
  std::optional<std::size_t> node_at(const Point& x) const;

  bool operator==(const Grid3& o) const {
    return n_ == o.n_ && half_width_ == o.half_width_ && step_ == o.step_;
  }

 private:
  double half_width_;
  double step_;
  int n_;
};

Grid3 build_grid(double half_width, double step);

enum class Face { Bottom, Top, Lateral };

const char* to_string(Face f);

/// Face of a boundary node; x3-extreme nodes (including edges and corners)
/// belong to Bottom or Top. Interior nodes yield nullopt.
std::optional<Face> face_of(const Grid3& g, int i, int j, int l);

struct BoundaryFaces {
  std::vector<std::size_t> bottom;
  std::vector<std::size_t> top;
  std::vector<std::size_t> lateral;

  const std::vector<std::size_t>& operator[](Face f) const;
  /// All boundary nodes in increasing linear index order.
  std::vector<std::size_t> all() const;
};

BoundaryFaces classify_boundary(const Grid3& g);

/// Smooth cutoff: 1 on the inner sub-cube, 0 within `inner_margin` of the
/// boundary, a per-axis product of quintic smoothstep ramps in between.
struct CutoffField {
  double inner_margin = 0.0;
  double transition = 0.0;
  RealField values;

  /// Half-width of the region where the cutoff equals 1.
  double plateau_half_width(const Grid3& g) const {
    return g.half_width() - inner_margin - transition;
  }
};

inline constexpr double kDefaultCutoffMargin = 0.4;
inline constexpr double kDefaultCutoffTransition = 0.3;

CutoffField build_cutoff(const Grid3& g,
                         double inner_margin = kDefaultCutoffMargin,
                         double transition = kDefaultCutoffTransition);

/// One-dimensional cutoff profile as a function of the distance to the
/// boundary.
double cutoff_profile(double distance_to_boundary, double inner_margin,
                      double transition);

}  // namespace freqinv
