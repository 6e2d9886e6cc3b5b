#pragma once

// Uniform grids in one to three dimensions, quaternion-valued fields sampled
// on them, and second-order finite-difference calculus.

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qqm/quaternion.hpp"

namespace qqm {

enum class Boundary { periodic, dirichlet_zero };

/// A box [-L/2, L/2) per axis with n nodes and spacing h = L / n.
class Grid {
 public:
  Grid() = default;
  Grid(int dims, std::array<int, 3> n, std::array<double, 3> length,
       Boundary boundary = Boundary::periodic);

  static Grid line(int n, double length, Boundary b = Boundary::periodic);
  static Grid cube(int n, double length, Boundary b = Boundary::periodic);

  int dims() const { return dims_; }
  int n(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  double length(int axis) const { return length_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return length(axis) / n(axis); }
  Boundary boundary() const { return boundary_; }
  std::size_t size() const { return size_; }

  /// Index stride of an axis in the flat node array (x fastest).
  std::size_t stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }
  std::size_t index(int ix, int iy = 0, int iz = 0) const {
    return static_cast<std::size_t>(ix) + stride_[1] * iy + stride_[2] * iz;
  }
  /// Per-axis node index of a flat index.
  std::array<int, 3> unravel(std::size_t idx) const;
  double coordinate(int axis, int i) const { return -0.5 * length(axis) + i * spacing(axis); }
  std::array<double, 3> position(std::size_t idx) const;

  /// Volume element h^dims.
  double cell_volume() const;

  /// Quadrature weight of a node: cell volume, halved on dirichlet faces.
  double weight(std::size_t idx) const;

  /// True when every active-axis coordinate is at least `margin` (physical
  /// distance) away from the box faces.
  bool is_interior(std::size_t idx, double margin) const;

  /// Throws ConfigError if `axis` cannot carry a central difference.
  void require_differentiable(int axis) const;
  void require_3d(const char* what) const;

  bool same_as(const Grid& o) const;

  /// Same extents and boundary with n multiplied by `factor` on each active axis.
  Grid refined(int factor) const;

 private:
  int dims_ = 1;
  std::array<int, 3> n_{1, 1, 1};
  std::array<double, 3> length_{1.0, 1.0, 1.0};
  Boundary boundary_ = Boundary::periodic;
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::size_t size_ = 1;
};

/// Quaternion-valued field on a grid.
class QField {
 public:
  QField() = default;
  explicit QField(Grid grid);
  QField(Grid grid, std::vector<Quaternion> values);

  static QField constant(const Grid& grid, Quaternion value);
  /// Nodewise evaluation of f(x, y, z).
  static QField sample(const Grid& grid,
                       const std::function<Quaternion(double, double, double)>& f);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  const Quaternion& operator[](std::size_t i) const { return values_[i]; }
  Quaternion& operator[](std::size_t i) { return values_[i]; }
  const std::vector<Quaternion>& values() const { return values_; }

  bool all_finite() const;

  friend QField operator+(const QField& a, const QField& b);
  friend QField operator-(const QField& a, const QField& b);
  friend QField operator-(const QField& a);
  friend QField operator*(double s, const QField& a);
  /// Nodewise Hamilton product a(x) b(x).
  friend QField operator*(const QField& a, const QField& b);
  friend QField operator*(const Quaternion& q, const QField& a);
  friend QField operator*(const QField& a, const Quaternion& q);

 private:
  Grid grid_;
  std::vector<Quaternion> values_;
};

QField conj(const QField& f);

/// Three quaternion fields on a common grid.
struct QVectorField {
  std::array<QField, 3> c;

  const QField& operator[](int a) const { return c[static_cast<std::size_t>(a)]; }
  QField& operator[](int a) { return c[static_cast<std::size_t>(a)]; }
  const Grid& grid() const { return c[0].grid(); }
  QVector3 at(std::size_t idx) const { return {{c[0][idx], c[1][idx], c[2][idx]}}; }

  static QVectorField zero(const Grid& grid);
  static QVectorField sample(const Grid& grid,
                             const std::function<QVector3(double, double, double)>& f);
};

QVectorField operator+(const QVectorField& a, const QVectorField& b);
QVectorField operator-(const QVectorField& a, const QVectorField& b);
QVectorField operator*(double s, const QVectorField& a);

/// Nodewise quaternionic vector product (qcross).
QVectorField qcross(const QVectorField& x, const QVectorField& y);

/// Central difference along an axis, O(h^2).
QField gradient(const QField& f, int axis);
/// Three-point Laplacian summed over active axes, O(h^2).
QField laplacian(const QField& f);
/// Componentwise curl; 3D grids only.
QVectorField curl(const QVectorField& f);
/// Sum of central differences of components; 3D grids only.
QField divergence(const QVectorField& f);
/// Divergence over the active axes of a grid of any dimension.
QField divergence_active(const QVectorField& f);

/// Quadrature matched to the boundary policy.
Quaternion integrate(const QField& f);

/// Largest component magnitude over nodes passing `keep` (all nodes if empty).
double max_abs(const QField& f, const std::function<bool(std::size_t)>& keep = {});

/// Discrete L2 norm sqrt(integral |f|^2).
double l2_norm(const QField& f);

/// Text export, one node per row after the header
///   index,ix,iy,iz,x,y,z,x0,x1,x2,x3
/// with x fastest and every real printed as %.17g.
std::string field_table(const QField& f);

}  // namespace qqm
