#include "freqinv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace freqinv {

Grid3::Grid3(double half_width, double step)
    : half_width_(half_width), step_(step), n_(0) {
  if (!(half_width > 0.0) || !(step > 0.0)) {
    std::ostringstream os;
    os << "grid: half_width (" << half_width << ") and step (" << step
       << ") must be positive";
    throw ConfigError(os.str());
  }
  const double intervals = 2.0 * half_width / step;
  const double rounded = std::round(intervals);
  if (std::abs(intervals - rounded) > 1e-12 * std::max(1.0, intervals) ||
      rounded < 1.0) {
    std::ostringstream os;
    os << "grid: step " << step << " does not divide 2*half_width = "
       << 2.0 * half_width;
    throw ConfigError(os.str());
  }
  n_ = static_cast<int>(rounded) + 1;
}

std::optional<int> Grid3::nearest_axis_index(double x) const {
  const double t = (x + half_width_) / step_;
  const double r = std::round(t);
  if (r < 0.0 || r > n_ - 1) return std::nullopt;
  return static_cast<int>(r);
}

std::optional<std::size_t> Grid3::nearest_node(const Point& x) const {
  std::array<int, 3> id{};
  for (int a = 0; a < 3; ++a) {
    auto k = nearest_axis_index(x[static_cast<std::size_t>(a)]);
    if (!k) return std::nullopt;
    id[static_cast<std::size_t>(a)] = *k;
  }
  return index(id[0], id[1], id[2]);
}

std::optional<std::size_t> Grid3::node_at(const Point& x) const {
  auto idx = nearest_node(x);
  if (!idx) return std::nullopt;
  const Point p = point(*idx);
  for (std::size_t a = 0; a < 3; ++a)
    if (std::abs(p[a] - x[a]) > 1e-9 * step_) return std::nullopt;
  return idx;
}

Grid3 build_grid(double half_width, double step) {
  return Grid3(half_width, step);
}

const char* to_string(Face f) {
  switch (f) {
    case Face::Bottom:
      return "bottom";
    case Face::Top:
      return "top";
    case Face::Lateral:
      return "lateral";
  }
  return "?";
}

std::optional<Face> face_of(const Grid3& g, int i, int j, int l) {
  const int last = g.nodes_per_axis() - 1;
  if (l == 0) return Face::Bottom;
  if (l == last) return Face::Top;
  if (i == 0 || j == 0 || i == last || j == last) return Face::Lateral;
  return std::nullopt;
}

const std::vector<std::size_t>& BoundaryFaces::operator[](Face f) const {
  switch (f) {
    case Face::Bottom:
      return bottom;
    case Face::Top:
      return top;
    case Face::Lateral:
      break;
  }
  return lateral;
}

std::vector<std::size_t> BoundaryFaces::all() const {
  std::vector<std::size_t> out;
  out.reserve(bottom.size() + top.size() + lateral.size());
  out.insert(out.end(), bottom.begin(), bottom.end());
  out.insert(out.end(), top.begin(), top.end());
  out.insert(out.end(), lateral.begin(), lateral.end());
  std::sort(out.begin(), out.end());
  return out;
}

BoundaryFaces classify_boundary(const Grid3& g) {
  BoundaryFaces f;
  const int n = g.nodes_per_axis();
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        auto face = face_of(g, i, j, l);
        if (!face) continue;
        const auto idx = g.index(i, j, l);
        switch (*face) {
          case Face::Bottom:
            f.bottom.push_back(idx);
            break;
          case Face::Top:
            f.top.push_back(idx);
            break;
          case Face::Lateral:
            f.lateral.push_back(idx);
            break;
        }
      }
  return f;
}

double cutoff_profile(double d, double inner_margin, double transition) {
  if (d <= inner_margin) return 0.0;
  if (d >= inner_margin + transition) return 1.0;
  const double t = (d - inner_margin) / transition;
  // Quintic smoothstep: C2 at both ends.
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

CutoffField build_cutoff(const Grid3& g, double inner_margin,
                         double transition) {
  if (inner_margin < 0.0 || !(transition > 0.0) ||
      !(inner_margin + transition < g.half_width())) {
    std::ostringstream os;
    os << "cutoff: inner_margin (" << inner_margin << ") + transition ("
       << transition << ") must be below half_width " << g.half_width();
    throw ConfigError(os.str());
  }
  CutoffField cut;
  cut.inner_margin = inner_margin;
  cut.transition = transition;
  const int n = g.nodes_per_axis();
  std::vector<double> axis(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    axis[static_cast<std::size_t>(i)] = cutoff_profile(
        g.half_width() - std::abs(g.coord(i)), inner_margin, transition);
  cut.values.resize(static_cast<Eigen::Index>(g.size()));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        cut.values[static_cast<Eigen::Index>(g.index(i, j, l))] =
            axis[static_cast<std::size_t>(i)] *
            axis[static_cast<std::size_t>(j)] *
            axis[static_cast<std::size_t>(l)];
  return cut;
}

}  // namespace freqinv
