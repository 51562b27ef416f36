#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pks/grid.hpp"

using namespace pks;

namespace {

constexpr double kPi = std::numbers::pi;

FieldXd gaussian(const Grid2d& g, double mass, double sigma, double cx = 0, double cy = 0) {
  return sample(g, [&](double x, double y) {
    const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
    return mass / (2 * kPi * sigma * sigma) * std::exp(-r2 / (2 * sigma * sigma));
  });
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid2d g(8, 256);
  CHECK(g.spacing() == 0.0625);
  CHECK(g.face(0) == -8);
  CHECK(g.face(256) == 8);
  CHECK(g.face(128) == 0);
  for (int j = 0; j < 256; ++j) {
    CHECK(g.center(g.mirror(j)) == -g.center(j));
  }
  CHECK(g.center(128) == 0.5 * g.spacing());
}

TEST_CASE("grid rejects odd and nonpositive sizes") {
  CHECK_THROWS_WITH_AS(Grid2d(8, 255), "N must be even", Error);
  CHECK_THROWS_AS(Grid2d(8, 0), Error);
  CHECK_THROWS_AS(Grid2d(-1, 64), Error);
}

TEST_CASE("density field invariants") {
  const Grid2d g(1, 4);
  FieldXd v = g.zeros();
  v(1, 1) = -1e-3;
  CHECK_THROWS_AS(DensityField(g, v), Error);
  CHECK_THROWS_AS(DensityField(g, FieldXd::Zero(3, 4)), Error);
}

TEST_CASE("gaussian moments match closed forms") {
  const Grid2d g(8, 256);
  const double mass = 12 * kPi, sigma = 1;
  const DensityField n(g, gaussian(g, mass, sigma));
  CHECK(integrate(n) == doctest::Approx(mass).epsilon(1e-12));
  CHECK(moment(n, weights::second()) == doctest::Approx(2 * sigma * sigma * mass).epsilon(1e-12));
  CHECK(moment(n, weights::fourth()) == doctest::Approx(6 * std::pow(sigma, 4) * mass).epsilon(1e-11));
  CHECK(std::abs(moment(n, weights::skew())) < 1e-12 * mass);
  CHECK(std::abs(moment(n, weights::x2())) < 1e-12 * mass);
}

TEST_CASE("half-plane statistics of a centered gaussian are half-normal") {
  const Grid2d g(8, 512);
  const double mass = 4 * kPi, sigma = 1;
  const DensityField n(g, gaussian(g, mass, sigma));
  const auto s = half_plane_stats(n);
  CHECK(s.mass == doctest::Approx(mass / 2).epsilon(1e-12));
  // Midpoint sums over the half plane carry an O(h^2) edge error.
  CHECK(s.center == doctest::Approx(sigma * std::sqrt(2 / kPi)).epsilon(1e-4));
  CHECK(s.variance == doctest::Approx(mass / 2 * sigma * sigma * (1 - 2 / kPi)).epsilon(1e-4));
  const auto full = half_plane_stats(n, VarianceMode::full_position);
  CHECK(full.variance == doctest::Approx(s.variance + mass / 2 * sigma * sigma).epsilon(1e-4));
}

TEST_CASE("two separated bumps: y+ = y0 and V+ = M+ sigma^2") {
  const Grid2d g(24, 512);
  const double mass = 12 * kPi, sigma = 0.5, y0 = 4;
  FieldXd v = gaussian(g, mass / 2, sigma, 0, y0) + gaussian(g, mass / 2, sigma, 0, -y0);
  const DensityField n(g, v);
  CHECK(mirror_symmetry_error(n) == 0);
  const auto s = half_plane_stats(n);
  CHECK(s.mass == doctest::Approx(mass / 2).epsilon(1e-12));
  CHECK(s.center == doctest::Approx(y0).epsilon(1e-12));
  CHECK(s.variance == doctest::Approx(mass / 2 * sigma * sigma).epsilon(1e-10));
}

TEST_CASE("strip mass on a face-aligned strip") {
  const Grid2d g(8, 512);
  const double mass = 1, sigma = 1;
  const DensityField n(g, gaussian(g, mass, sigma));
  const double w = 1.0;
  CHECK(strip_mass(n, w) == doctest::Approx(mass * std::erf(w / (sigma * std::sqrt(2.0)))).epsilon(1e-4));
  CHECK_THROWS_AS(strip_mass(n, 0.0), Error);
}

TEST_CASE("mirror parity of weights") {
  CHECK(weights::second().x2_parity() == 1);
  CHECK(weights::x2().x2_parity() == -1);
  Weight mixed{{{0, 1, 1.0}, {0, 2, 1.0}}};
  CHECK(mixed.x2_parity() == 0);
  CHECK(weights::skew()(1.0, 2.0) == 3.0);
}

TEST_CASE("mirror symmetry error detects asymmetry") {
  const Grid2d g(2, 8);
  FieldXd v = FieldXd::Ones(8, 8);
  CHECK(mirror_symmetry_error(v) == 0);
  v(3, 1) = 2;
  CHECK(mirror_symmetry_error(v) == 1);
}

TEST_CASE("boundary mass counts the outer ring once") {
  const Grid2d g(2, 4);
  const DensityField n(g, FieldXd::Ones(4, 4));
  CHECK(boundary_mass(n) == doctest::Approx(12 * g.cell_area()));
}
