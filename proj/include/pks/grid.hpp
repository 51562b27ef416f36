#pragma once

// Cell-centered uniform grid on [-L, L]^2 and the reductions every diagnostic
// is built from. Fields are Eigen arrays indexed (i, j) with i along x1 and j
// along x2; column-major storage keeps x1 contiguous for a fixed x2 row.

#include <Eigen/Core>

#include "pks/log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pks {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
using Field = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct Point2 {
  Scalar x1 = 0;
  Scalar x2 = 0;
};

/// Square grid of N x N cells of side h = 2L/N. N is even, so the x1-axis
/// runs along cell faces and the mirror x2 -> -x2 maps cell j to N-1-j.
template <typename Scalar>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(Scalar half_width, int cells) : half_width_(half_width), cells_(cells) {
    if (!(half_width > 0)) throw Error("grid half width must be positive");
    if (cells <= 0) throw Error("N must be positive");
    if (cells % 2 != 0) throw Error("N must be even");
    spacing_ = 2 * half_width / static_cast<Scalar>(cells);
  }

  Scalar half_width() const { return half_width_; }
  int cells() const { return cells_; }
  Scalar spacing() const { return spacing_; }
  Scalar cell_area() const { return spacing_ * spacing_; }

  // Written as (index - N/2 + 1/2) h so mirrored centers are exact negatives.
  Scalar center(int index) const {
    return (static_cast<Scalar>(index - cells_ / 2) + Scalar(0.5)) * spacing_;
  }
  /// Position of face f (0..N) between cells f-1 and f.
  Scalar face(int f) const { return static_cast<Scalar>(f - cells_ / 2) * spacing_; }
  Point2<Scalar> center(int i, int j) const { return {center(i), center(j)}; }
  int mirror(int j) const { return cells_ - 1 - j; }

  Field<Scalar> zeros() const { return Field<Scalar>::Zero(cells_, cells_); }

  friend bool operator==(const Grid2& a, const Grid2& b) {
    return a.half_width_ == b.half_width_ && a.cells_ == b.cells_;
  }

 private:
  Scalar half_width_ = 1;
  int cells_ = 2;
  Scalar spacing_ = 1;
};

/// Nonnegative cell-averaged density on a grid.
template <typename Scalar>
struct DensityField2 {
  Grid2<Scalar> grid;
  Field<Scalar> values;

  DensityField2() = default;
  DensityField2(Grid2<Scalar> g, Field<Scalar> v) : grid(g), values(std::move(v)) {
    if (values.rows() != grid.cells() || values.cols() != grid.cells())
      throw Error("density shape does not match grid");
    if ((values < Scalar(0)).any()) throw Error("density must be nonnegative");
  }
  explicit DensityField2(Grid2<Scalar> g) : grid(g), values(g.zeros()) {}
};

template <typename Scalar>
struct VectorField2 {
  Grid2<Scalar> grid;
  Field<Scalar> x1;
  Field<Scalar> x2;

  VectorField2() = default;
  explicit VectorField2(Grid2<Scalar> g) : grid(g), x1(g.zeros()), x2(g.zeros()) {}
};

using Grid2d = Grid2<double>;
using FieldXd = Field<double>;
using DensityField = DensityField2<double>;
using VectorField = VectorField2<double>;
using Point = Point2<double>;

/// Samples fn(x1, x2) at every cell center.
template <typename Scalar, typename Fn>
Field<Scalar> sample(const Grid2<Scalar>& grid, Fn&& fn) {
  const int n = grid.cells();
  Field<Scalar> out(n, n);
  for (int j = 0; j < n; ++j) {
    const Scalar y = grid.center(j);
    for (int i = 0; i < n; ++i) out(i, j) = fn(grid.center(i), y);
  }
  return out;
}

template <typename Scalar>
Scalar integrate(const Grid2<Scalar>& grid, const Field<Scalar>& f) {
  return grid.cell_area() * f.sum();
}

template <typename Scalar>
Scalar integrate(const DensityField2<Scalar>& f) {
  return integrate(f.grid, f.values);
}

/// Weight polynomial as a sum of monomials coeff * x1^p1 * x2^p2.
template <typename Scalar>
struct Monomial {
  int p1 = 0;
  int p2 = 0;
  Scalar coeff = 1;
};

template <typename Scalar>
struct Weight2 {
  std::vector<Monomial<Scalar>> terms;

  Scalar operator()(Scalar x1, Scalar x2) const {
    Scalar s = 0;
    for (const auto& m : terms) {
      s += m.coeff * ipow(x1, m.p1) * ipow(x2, m.p2);
    }
    return s;
  }

  /// Mirror parity in x2: +1 even, -1 odd, 0 mixed.
  int x2_parity() const {
    bool even = true, odd = true;
    for (const auto& m : terms) (m.p2 % 2 == 0 ? odd : even) = false;
    return even ? 1 : (odd ? -1 : 0);
  }

 private:
  static Scalar ipow(Scalar x, int p) {
    Scalar r = 1;
    for (int k = 0; k < p; ++k) r *= x;
    return r;
  }
};

using Weight = Weight2<double>;

namespace weights {
inline Weight one() { return {{{0, 0, 1.0}}}; }
inline Weight x2() { return {{{0, 1, 1.0}}}; }
/// |x|^2
inline Weight second() { return {{{2, 0, 1.0}, {0, 2, 1.0}}}; }
/// x2^2 - x1^2
inline Weight skew() { return {{{0, 2, 1.0}, {2, 0, -1.0}}}; }
/// x1^4 + x2^4
inline Weight fourth() { return {{{4, 0, 1.0}, {0, 4, 1.0}}}; }
inline Weight monomial(int p1, int p2, double coeff = 1.0) { return {{{p1, p2, coeff}}}; }
}  // namespace weights

template <typename Scalar>
Scalar moment(const Grid2<Scalar>& grid, const Field<Scalar>& f, const Weight2<Scalar>& w) {
  const int n = grid.cells();
  Scalar s = 0;
  for (int j = 0; j < n; ++j) {
    const Scalar y = grid.center(j);
    for (int i = 0; i < n; ++i) s += w(grid.center(i), y) * f(i, j);
  }
  return grid.cell_area() * s;
}

template <typename Scalar>
Scalar moment(const DensityField2<Scalar>& f, const Weight2<Scalar>& w) {
  return moment(f.grid, f.values, w);
}

template <typename Scalar>
Scalar mirror_symmetry_error(const Field<Scalar>& f) {
  const auto n = f.cols();
  Scalar worst = 0;
  for (Eigen::Index j = 0; j < n / 2; ++j) {
    worst = std::max(worst, (f.col(j) - f.col(n - 1 - j)).abs().maxCoeff());
  }
  return worst;
}

template <typename Scalar>
Scalar mirror_symmetry_error(const DensityField2<Scalar>& f) {
  return mirror_symmetry_error(f.values);
}

/// Mass of cells whose center satisfies |x2| <= half_width.
template <typename Scalar>
Scalar strip_mass(const DensityField2<Scalar>& f, Scalar half_width) {
  if (!(half_width > 0)) throw Error("strip half width must be positive");
  const auto& g = f.grid;
  Scalar s = 0;
  for (int j = 0; j < g.cells(); ++j) {
    if (std::abs(g.center(j)) <= half_width) s += f.values.col(j).sum();
  }
  return g.cell_area() * s;
}

/// Mass in the outermost ring of cells; a proxy for truncation leakage.
template <typename Scalar>
Scalar boundary_mass(const DensityField2<Scalar>& f) {
  const auto& v = f.values;
  const auto n = v.rows();
  Scalar s = v.col(0).sum() + v.col(n - 1).sum();
  s += v.row(0).segment(1, n - 2).sum() + v.row(n - 1).segment(1, n - 2).sum();
  return f.grid.cell_area() * s;
}

enum class VarianceMode { vertical, full_position };

template <typename Scalar>
struct HalfPlaneStats {
  Scalar mass = 0;      // M+
  Scalar center = 0;    // y+
  Scalar variance = 0;  // V+
};

/// Upper-half-plane mass, x2 center of mass and spread. With VarianceMode::
/// vertical the spread is the integral of n |x2 - y+|^2; full_position uses
/// |x - (0, y+)|^2. Warns when the field is not mirror-symmetric unless
/// check_symmetry is off.
template <typename Scalar>
HalfPlaneStats<Scalar> half_plane_stats(const DensityField2<Scalar>& f,
                                        VarianceMode mode = VarianceMode::vertical,
                                        bool check_symmetry = true) {
  const auto& g = f.grid;
  const int n = g.cells();
  if (check_symmetry && f.values.size() > 0 &&
      mirror_symmetry_error(f.values) > Scalar(1e-10) * f.values.maxCoeff()) {
    log::warning("half_plane_stats: field is not mirror-symmetric about the x1-axis");
  }
  Scalar m = 0, my = 0;
  for (int j = n / 2; j < n; ++j) {
    const Scalar col = f.values.col(j).sum();
    m += col;
    my += col * g.center(j);
  }
  if (!(m > 0)) throw Error("empty upper half plane");
  HalfPlaneStats<Scalar> s;
  s.mass = g.cell_area() * m;
  s.center = my / m;
  Scalar var = 0;
  for (int j = n / 2; j < n; ++j) {
    const Scalar dy = g.center(j) - s.center;
    if (mode == VarianceMode::vertical) {
      var += f.values.col(j).sum() * dy * dy;
    } else {
      for (int i = 0; i < n; ++i) {
        const Scalar x = g.center(i);
        var += f.values(i, j) * (x * x + dy * dy);
      }
    }
  }
  s.variance = g.cell_area() * var;
  return s;
}

}  // namespace pks
