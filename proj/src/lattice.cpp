#include "qqm/lattice.hpp"

#include <cmath>
#include <ostream>
#include <cstdio>
#include <string>

#include "qqm/errors.hpp"

namespace qqm {

std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
  return os << '(' << q.x0() << ", " << q.x1() << ", " << q.x2() << ", " << q.x3() << ')';
}

Grid::Grid(int dims, std::array<int, 3> n, std::array<double, 3> length, Boundary boundary)
    : dims_(dims), n_(n), length_(length), boundary_(boundary) {
  if (dims < 1 || dims > 3) throw ConfigError("grid.dims must be 1, 2 or 3");
  for (int a = 0; a < 3; ++a) {
    auto& na = n_[static_cast<std::size_t>(a)];
    auto& la = length_[static_cast<std::size_t>(a)];
    if (a >= dims) {
      na = 1;
      la = 1.0;
      continue;
    }
    if (na < 1) throw ConfigError("grid.n must be positive on axis " + std::to_string(a));
    if (!(la > 0.0) || !std::isfinite(la))
      throw ConfigError("grid.length must be positive and finite on axis " + std::to_string(a));
  }
  stride_ = {1, static_cast<std::size_t>(n_[0]), static_cast<std::size_t>(n_[0]) * n_[1]};
  size_ = stride_[2] * static_cast<std::size_t>(n_[2]);
}

Grid Grid::line(int n, double length, Boundary b) { return Grid(1, {n, 1, 1}, {length, 1, 1}, b); }

Grid Grid::cube(int n, double length, Boundary b) {
  return Grid(3, {n, n, n}, {length, length, length}, b);
}

std::array<int, 3> Grid::unravel(std::size_t idx) const {
  return {static_cast<int>(idx % stride_[1]), static_cast<int>((idx / stride_[1]) % n_[1]),
          static_cast<int>(idx / stride_[2])};
}

std::array<double, 3> Grid::position(std::size_t idx) const {
  const auto ijk = unravel(idx);
  std::array<double, 3> r{0.0, 0.0, 0.0};
  for (int a = 0; a < dims_; ++a) r[static_cast<std::size_t>(a)] = coordinate(a, ijk[static_cast<std::size_t>(a)]);
  return r;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dims_; ++a) v *= spacing(a);
  return v;
}

double Grid::weight(std::size_t idx) const {
  double w = cell_volume();
  if (boundary_ == Boundary::dirichlet_zero) {
    const auto ijk = unravel(idx);
    for (int a = 0; a < dims_; ++a) {
      const int i = ijk[static_cast<std::size_t>(a)];
      if (i == 0 || i == n(a) - 1) w *= 0.5;
    }
  }
  return w;
}

bool Grid::is_interior(std::size_t idx, double margin) const {
  const auto r = position(idx);
  for (int a = 0; a < dims_; ++a) {
    const double half = 0.5 * length(a);
    const double x = r[static_cast<std::size_t>(a)];
    // The last node sits at half - h; measure distance to the periodic image.
    if (x - (-half) < margin || (half - spacing(a)) - x < margin) return false;
  }
  return true;
}

void Grid::require_differentiable(int axis) const {
  if (axis < 0 || axis >= dims_)
    throw ConfigError("axis " + std::to_string(axis) + " is not active on a " +
                      std::to_string(dims_) + "D grid");
  if (n(axis) < 3)
    throw ConfigError("degenerate grid: axis " + std::to_string(axis) + " has n = " +
                      std::to_string(n(axis)) + " < 3 nodes");
}

void Grid::require_3d(const char* what) const {
  if (dims_ != 3) throw ConfigError(std::string(what) + " requires a 3D grid");
}

bool Grid::same_as(const Grid& o) const {
  return dims_ == o.dims_ && n_ == o.n_ && length_ == o.length_ && boundary_ == o.boundary_;
}

Grid Grid::refined(int factor) const {
  auto n = n_;
  for (int a = 0; a < dims_; ++a) n[static_cast<std::size_t>(a)] *= factor;
  return Grid(dims_, n, length_, boundary_);
}

// ---------------------------------------------------------------------------

QField::QField(Grid grid) : grid_(std::move(grid)), values_(grid_.size()) {}

QField::QField(Grid grid, std::vector<Quaternion> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ConfigError("field size does not match grid");
}

QField QField::constant(const Grid& grid, Quaternion value) {
  return QField(grid, std::vector<Quaternion>(grid.size(), value));
}

QField QField::sample(const Grid& grid,
                      const std::function<Quaternion(double, double, double)>& f) {
  QField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto r = grid.position(i);
    out.values_[i] = f(r[0], r[1], r[2]);
  }
  return out;
}

bool QField::all_finite() const {
  for (const auto& q : values_)
    if (!std::isfinite(q.x0()) || !std::isfinite(q.x1()) || !std::isfinite(q.x2()) ||
        !std::isfinite(q.x3()))
      return false;
  return true;
}

namespace {

void require_same(const QField& a, const QField& b) {
  if (!a.grid().same_as(b.grid())) throw ConfigError("grid mismatch between fields");
}

template <class F>
QField zip(const QField& a, const QField& b, F f) {
  require_same(a, b);
  std::vector<Quaternion> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(a[i], b[i]);
  return QField(a.grid(), std::move(out));
}

template <class F>
QField map(const QField& a, F f) {
  std::vector<Quaternion> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(a[i]);
  return QField(a.grid(), std::move(out));
}

}  // namespace

QField operator+(const QField& a, const QField& b) {
  return zip(a, b, [](const Quaternion& x, const Quaternion& y) { return x + y; });
}
QField operator-(const QField& a, const QField& b) {
  return zip(a, b, [](const Quaternion& x, const Quaternion& y) { return x - y; });
}
QField operator-(const QField& a) {
  return map(a, [](const Quaternion& x) { return -x; });
}
QField operator*(double s, const QField& a) {
  return map(a, [s](const Quaternion& x) { return s * x; });
}
QField operator*(const QField& a, const QField& b) {
  return zip(a, b, [](const Quaternion& x, const Quaternion& y) { return x * y; });
}
QField operator*(const Quaternion& q, const QField& a) {
  return map(a, [&q](const Quaternion& x) { return q * x; });
}
QField operator*(const QField& a, const Quaternion& q) {
  return map(a, [&q](const Quaternion& x) { return x * q; });
}

QField conj(const QField& f) {
  return map(f, [](const Quaternion& x) { return qconj(x); });
}

QVectorField QVectorField::zero(const Grid& grid) {
  return {{QField(grid), QField(grid), QField(grid)}};
}

QVectorField QVectorField::sample(const Grid& grid,
                                  const std::function<QVector3(double, double, double)>& f) {
  QVectorField out = zero(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto r = grid.position(i);
    const QVector3 v = f(r[0], r[1], r[2]);
    for (int a = 0; a < 3; ++a) out[a][i] = v[a];
  }
  return out;
}

QVectorField operator+(const QVectorField& a, const QVectorField& b) {
  return {{a[0] + b[0], a[1] + b[1], a[2] + b[2]}};
}
QVectorField operator-(const QVectorField& a, const QVectorField& b) {
  return {{a[0] - b[0], a[1] - b[1], a[2] - b[2]}};
}
QVectorField operator*(double s, const QVectorField& a) {
  return {{s * a[0], s * a[1], s * a[2]}};
}

QVectorField qcross(const QVectorField& x, const QVectorField& y) {
  require_same(x[0], y[0]);
  QVectorField out = QVectorField::zero(x.grid());
  for (std::size_t i = 0; i < x.grid().size(); ++i) {
    const QVector3 v = qcross(x.at(i), y.at(i));
    for (int a = 0; a < 3; ++a) out[a][i] = v[a];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stencils. Neighbour lookup wraps on periodic grids and reads a zero ghost
// node past the faces of dirichlet grids.

namespace {

struct AxisWalker {
  const Grid& g;
  int axis;
  std::size_t stride;
  int n;
  bool periodic;

  AxisWalker(const Grid& grid, int a)
      : g(grid), axis(a), stride(grid.stride(a)), n(grid.n(a)),
        periodic(grid.boundary() == Boundary::periodic) {}

  int coord(std::size_t idx) const { return static_cast<int>((idx / stride) % static_cast<std::size_t>(n)); }

  Quaternion plus(const QField& f, std::size_t idx, int i) const {
    if (i + 1 < n) return f[idx + stride];
    return periodic ? f[idx + stride - stride * static_cast<std::size_t>(n)] : Quaternion{};
  }
  Quaternion minus(const QField& f, std::size_t idx, int i) const {
    if (i > 0) return f[idx - stride];
    return periodic ? f[idx + stride * static_cast<std::size_t>(n - 1)] : Quaternion{};
  }
};

}  // namespace

QField gradient(const QField& f, int axis) {
  const Grid& g = f.grid();
  g.require_differentiable(axis);
  const AxisWalker w(g, axis);
  const double inv2h = 0.5 / g.spacing(axis);
  std::vector<Quaternion> out(f.size());
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const int i = w.coord(idx);
    out[idx] = inv2h * (w.plus(f, idx, i) - w.minus(f, idx, i));
  }
  return QField(g, std::move(out));
}

QField laplacian(const QField& f) {
  const Grid& g = f.grid();
  std::vector<Quaternion> out(f.size());
  for (int a = 0; a < g.dims(); ++a) {
    g.require_differentiable(a);
    const AxisWalker w(g, a);
    const double invh2 = 1.0 / (g.spacing(a) * g.spacing(a));
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
      const int i = w.coord(idx);
      out[idx] = out[idx] + invh2 * (w.plus(f, idx, i) - 2.0 * f[idx] + w.minus(f, idx, i));
    }
  }
  return QField(g, std::move(out));
}

QVectorField curl(const QVectorField& f) {
  f.grid().require_3d("curl");
  return {{gradient(f[2], 1) - gradient(f[1], 2), gradient(f[0], 2) - gradient(f[2], 0),
           gradient(f[1], 0) - gradient(f[0], 1)}};
}

QField divergence(const QVectorField& f) {
  f.grid().require_3d("divergence");
  return divergence_active(f);
}

QField divergence_active(const QVectorField& f) {
  QField out(f.grid());
  for (int a = 0; a < f.grid().dims(); ++a) out = out + gradient(f[a], a);
  return out;
}

Quaternion integrate(const QField& f) {
  const Grid& g = f.grid();
  double s[4] = {0, 0, 0, 0};
  if (g.boundary() == Boundary::periodic) {
    for (const auto& q : f.values()) {
      s[0] += q.x0();
      s[1] += q.x1();
      s[2] += q.x2();
      s[3] += q.x3();
    }
    const double v = g.cell_volume();
    return {v * s[0], v * s[1], v * s[2], v * s[3]};
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = g.weight(i);
    s[0] += w * f[i].x0();
    s[1] += w * f[i].x1();
    s[2] += w * f[i].x2();
    s[3] += w * f[i].x3();
  }
  return {s[0], s[1], s[2], s[3]};
}

double max_abs(const QField& f, const std::function<bool(std::size_t)>& keep) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (keep && !keep(i)) continue;
    for (double c : f[i].components()) m = std::max(m, std::abs(c));
  }
  return m;
}

double l2_norm(const QField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.grid().weight(i) * norm2(f[i]);
  return std::sqrt(s);
}

std::string field_table(const QField& f) {
  const Grid& g = f.grid();
  std::string out = "index,ix,iy,iz,x,y,z,x0,x1,x2,x3\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    out += buf;
  };
  for (std::size_t n = 0; n < f.size(); ++n) {
    const auto ijk = g.unravel(n);
    const auto pos = g.position(n);
    std::snprintf(buf, sizeof buf, "%zu,%d,%d,%d", n, ijk[0], ijk[1], ijk[2]);
    out += buf;
    for (double v : pos) put(v);
    for (double v : f[n].components()) put(v);
    out += '\n';
  }
  return out;
}

}  // namespace qqm
