#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "elastmix/common.hpp"

namespace elastmix {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Axis-aligned box [lo, hi]. Degenerate along some axes when it describes a
/// face or an (n-2)-face.
template <int Dim>
struct Box {
  Vec<Dim> lo = Vec<Dim>::Zero();
  Vec<Dim> hi = Vec<Dim>::Ones();

  double size(int axis) const { return hi[axis] - lo[axis]; }
  double volume() const {
    double v = 1.0;
    for (int k = 0; k < Dim; ++k) v *= size(k);
    return v;
  }
  /// Maps a point of [0,1]^Dim to the box.
  Vec<Dim> map(const Vec<Dim>& ref) const {
    return lo + (hi - lo).cwiseProduct(ref);
  }
  Vec<Dim> to_reference(const Vec<Dim>& x) const {
    return (x - lo).cwiseQuotient(hi - lo);
  }
};

/// (n-1)-face perpendicular to `axis`. pos[axis] is the plane index in
/// [0, N_axis]; the other entries are element indices in [0, N_k).
template <int Dim>
struct FaceId {
  int axis = 0;
  MultiIndex<Dim> pos{};
  bool operator==(const FaceId&) const = default;
};

/// (n-2)-face perpendicular to axes i < j. pos[i], pos[j] are plane indices;
/// the other entries are element indices. For Dim == 2 these are vertices.
template <int Dim>
struct RidgeId {
  int i = 0;
  int j = 1;
  MultiIndex<Dim> pos{};
  bool operator==(const RidgeId&) const = default;
};

namespace detail {

template <int Dim>
std::size_t flatten(const MultiIndex<Dim>& pos, const MultiIndex<Dim>& extent) {
  std::size_t flat = 0;
  for (int k = Dim - 1; k >= 0; --k) flat = flat * extent[k] + pos[k];
  return flat;
}

template <int Dim>
MultiIndex<Dim> unflatten(std::size_t flat, const MultiIndex<Dim>& extent) {
  MultiIndex<Dim> pos{};
  for (int k = 0; k < Dim; ++k) {
    pos[k] = static_cast<int>(flat % extent[k]);
    flat /= extent[k];
  }
  return pos;
}

template <int Dim>
std::size_t product(const MultiIndex<Dim>& extent) {
  std::size_t p = 1;
  for (int e : extent) p *= static_cast<std::size_t>(e);
  return p;
}

template <int Dim>
bool in_range(const MultiIndex<Dim>& pos, const MultiIndex<Dim>& extent) {
  for (int k = 0; k < Dim; ++k)
    if (pos[k] < 0 || pos[k] >= extent[k]) return false;
  return true;
}

}  // namespace detail

/// Uniform tensor-product grid of an n-dimensional box.
///
/// Elements are addressed by 0-based multi-indices l with 0 <= l_k < N_k and
/// flattened with axis 0 varying fastest. Faces and (n-2)-faces use the same
/// flattening over their own extents (N_k + 1 along the perpendicular axes).
/// Coordinates are computed on demand from the box and the counts.
template <int Dim>
class TensorGrid {
  static_assert(Dim >= 2, "TensorGrid requires at least two dimensions");

public:
  static constexpr int dim = Dim;

  TensorGrid(const std::array<Interval, Dim>& box, const MultiIndex<Dim>& subdivisions)
      : box_(box), n_(subdivisions) {
    for (int k = 0; k < Dim; ++k) {
      if (!(box_[k].hi > box_[k].lo) || !std::isfinite(box_[k].lo) || !std::isfinite(box_[k].hi))
        throw InvalidArgument("TensorGrid: empty or non-finite interval on axis " + std::to_string(k));
      if (n_[k] < 1)
        throw InvalidArgument("TensorGrid: subdivision count must be >= 1 on axis " + std::to_string(k));
    }
  }

  /// [0,1]^Dim with n cells per axis.
  static TensorGrid unit(int n) {
    std::array<Interval, Dim> box;
    box.fill(Interval{0.0, 1.0});
    MultiIndex<Dim> counts;
    counts.fill(n);
    return TensorGrid(box, counts);
  }

  const Interval& interval(int axis) const { return box_[axis]; }
  const MultiIndex<Dim>& subdivisions() const { return n_; }
  double spacing(int axis) const { return (box_[axis].hi - box_[axis].lo) / n_[axis]; }
  double max_spacing() const {
    double h = 0.0;
    for (int k = 0; k < Dim; ++k) h = std::max(h, spacing(k));
    return h;
  }

  bool operator==(const TensorGrid& other) const {
    for (int k = 0; k < Dim; ++k)
      if (box_[k].lo != other.box_[k].lo || box_[k].hi != other.box_[k].hi || n_[k] != other.n_[k])
        return false;
    return true;
  }

  // -- counts ---------------------------------------------------------------

  std::size_t num_elements() const { return detail::product<Dim>(n_); }
  std::size_t num_faces(int axis) const { return detail::product<Dim>(face_extent(axis)); }
  std::size_t num_faces() const {
    std::size_t total = 0;
    for (int k = 0; k < Dim; ++k) total += num_faces(k);
    return total;
  }
  std::size_t num_ridges(int i, int j) const { return detail::product<Dim>(ridge_extent(i, j)); }
  std::size_t num_ridges() const {
    std::size_t total = 0;
    for (auto [i, j] : axis_pairs<Dim>()) total += num_ridges(i, j);
    return total;
  }

  // -- flattening -----------------------------------------------------------

  MultiIndex<Dim> face_extent(int axis) const {
    auto e = n_;
    e[axis] += 1;
    return e;
  }
  MultiIndex<Dim> ridge_extent(int i, int j) const {
    auto e = n_;
    e[i] += 1;
    e[j] += 1;
    return e;
  }

  std::size_t element_flat(const MultiIndex<Dim>& l) const {
    check_element(l);
    return detail::flatten<Dim>(l, n_);
  }
  MultiIndex<Dim> element_index(std::size_t flat) const {
    if (flat >= num_elements()) throw InvalidArgument("TensorGrid: element id out of range");
    return detail::unflatten<Dim>(flat, n_);
  }

  /// Flat index of a face within the family of faces perpendicular to its axis.
  std::size_t face_flat(const FaceId<Dim>& f) const {
    check_face(f);
    return detail::flatten<Dim>(f.pos, face_extent(f.axis));
  }
  FaceId<Dim> face_from_flat(int axis, std::size_t flat) const {
    check_axis(axis);
    if (flat >= num_faces(axis)) throw InvalidArgument("TensorGrid: face id out of range");
    return {axis, detail::unflatten<Dim>(flat, face_extent(axis))};
  }

  std::size_t ridge_flat(const RidgeId<Dim>& r) const {
    check_ridge(r);
    return detail::flatten<Dim>(r.pos, ridge_extent(r.i, r.j));
  }
  RidgeId<Dim> ridge_from_flat(int i, int j, std::size_t flat) const {
    check_pair(i, j);
    if (flat >= num_ridges(i, j)) throw InvalidArgument("TensorGrid: ridge id out of range");
    return {i, j, detail::unflatten<Dim>(flat, ridge_extent(i, j))};
  }

  // -- geometry -------------------------------------------------------------

  double coordinate(int axis, double plane_index) const {
    return box_[axis].lo + plane_index * spacing(axis);
  }

  Box<Dim> element_box(const MultiIndex<Dim>& l) const {
    check_element(l);
    Box<Dim> b;
    for (int k = 0; k < Dim; ++k) {
      b.lo[k] = coordinate(k, l[k]);
      b.hi[k] = coordinate(k, l[k] + 1);
    }
    return b;
  }

  Box<Dim> face_box(const FaceId<Dim>& f) const {
    check_face(f);
    Box<Dim> b;
    for (int k = 0; k < Dim; ++k) {
      if (k == f.axis) {
        b.lo[k] = b.hi[k] = coordinate(k, f.pos[k]);
      } else {
        b.lo[k] = coordinate(k, f.pos[k]);
        b.hi[k] = coordinate(k, f.pos[k] + 1);
      }
    }
    return b;
  }

  Box<Dim> ridge_box(const RidgeId<Dim>& r) const {
    check_ridge(r);
    Box<Dim> b;
    for (int k = 0; k < Dim; ++k) {
      if (k == r.i || k == r.j) {
        b.lo[k] = b.hi[k] = coordinate(k, r.pos[k]);
      } else {
        b.lo[k] = coordinate(k, r.pos[k]);
        b.hi[k] = coordinate(k, r.pos[k] + 1);
      }
    }
    return b;
  }

  /// Element containing x (points on shared boundaries go to the higher index
  /// except at the upper end of the box).
  MultiIndex<Dim> locate(const Vec<Dim>& x) const {
    MultiIndex<Dim> l{};
    for (int k = 0; k < Dim; ++k) {
      const double t = (x[k] - box_[k].lo) / spacing(k);
      if (!(t >= -1e-12 && t <= n_[k] + 1e-12))
        throw InvalidArgument("TensorGrid::locate: point outside the box");
      l[k] = std::clamp(static_cast<int>(std::floor(t)), 0, n_[k] - 1);
    }
    return l;
  }

  // -- incidence ------------------------------------------------------------

  /// The 2*Dim faces of element l, ordered (axis 0 low, axis 0 high, axis 1 low, ...).
  std::array<FaceId<Dim>, 2 * Dim> element_faces(const MultiIndex<Dim>& l) const {
    check_element(l);
    std::array<FaceId<Dim>, 2 * Dim> out;
    for (int k = 0; k < Dim; ++k) {
      for (int side = 0; side < 2; ++side) {
        auto pos = l;
        pos[k] += side;
        out[2 * k + side] = {k, pos};
      }
    }
    return out;
  }

  /// The 4 * num_pairs(Dim) (n-2)-faces of element l: pair-major, and within a
  /// pair (i, j) the corners (0,0), (1,0), (0,1), (1,1) in (x_i, x_j).
  std::array<RidgeId<Dim>, 4 * num_pairs(Dim)> element_ridges(const MultiIndex<Dim>& l) const {
    check_element(l);
    std::array<RidgeId<Dim>, 4 * num_pairs(Dim)> out;
    int p = 0;
    for (auto [i, j] : axis_pairs<Dim>()) {
      for (int c = 0; c < 4; ++c) {
        auto pos = l;
        pos[i] += c & 1;
        pos[j] += (c >> 1) & 1;
        out[4 * p + c] = {i, j, pos};
      }
      ++p;
    }
    return out;
  }

  /// Elements sharing the face, lexicographic (axis 0 fastest).
  std::vector<MultiIndex<Dim>> adjacent_elements(const FaceId<Dim>& f) const {
    check_face(f);
    std::vector<MultiIndex<Dim>> out;
    for (int d = -1; d <= 0; ++d) {
      auto l = f.pos;
      l[f.axis] += d;
      if (detail::in_range<Dim>(l, n_)) out.push_back(l);
    }
    return out;
  }

  /// Elements sharing the (n-2)-face: up to four, lexicographic (axis 0 fastest).
  std::vector<MultiIndex<Dim>> adjacent_elements(const RidgeId<Dim>& r) const {
    check_ridge(r);
    std::vector<MultiIndex<Dim>> out;
    for (int dj = -1; dj <= 0; ++dj) {
      for (int di = -1; di <= 0; ++di) {
        auto l = r.pos;
        l[r.i] += di;
        l[r.j] += dj;
        if (detail::in_range<Dim>(l, n_)) out.push_back(l);
      }
    }
    return out;
  }

  bool on_boundary(const FaceId<Dim>& f) const {
    check_face(f);
    return f.pos[f.axis] == 0 || f.pos[f.axis] == n_[f.axis];
  }

private:
  void check_axis(int axis) const {
    if (axis < 0 || axis >= Dim) throw InvalidArgument("TensorGrid: axis out of range");
  }
  void check_pair(int i, int j) const {
    check_axis(i);
    check_axis(j);
    if (!(i < j)) throw InvalidArgument("TensorGrid: axis pair must satisfy i < j");
  }
  void check_element(const MultiIndex<Dim>& l) const {
    if (!detail::in_range<Dim>(l, n_)) throw InvalidArgument("TensorGrid: element index out of range");
  }
  void check_face(const FaceId<Dim>& f) const {
    check_axis(f.axis);
    if (!detail::in_range<Dim>(f.pos, face_extent(f.axis)))
      throw InvalidArgument("TensorGrid: face index out of range");
  }
  void check_ridge(const RidgeId<Dim>& r) const {
    check_pair(r.i, r.j);
    if (!detail::in_range<Dim>(r.pos, ridge_extent(r.i, r.j)))
      throw InvalidArgument("TensorGrid: (n-2)-face index out of range");
  }

  std::array<Interval, Dim> box_;
  MultiIndex<Dim> n_;
};

}  // namespace elastmix
