#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pks/dynamics.hpp"

using namespace pks;

namespace {

constexpr double kPi = std::numbers::pi;

FieldXd gaussian(const Grid2d& g, double mass, double var, double cx = 0, double cy = 0) {
  return sample(g, [&](double x, double y) {
    const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
    return mass / (2 * kPi * var) * std::exp(-r2 / (2 * var));
  });
}

}  // namespace

TEST_CASE("strain field") {
  const StrainField b{2.0};
  const Point v = b.velocity({1.5, -0.5});
  CHECK(v.x1 == -3.0);
  CHECK(v.x2 == -1.0);
  // b = grad H
  const double d = 1e-6;
  const Point x{0.3, 0.7};
  CHECK((b.potential({x.x1 + d, x.x2}) - b.potential({x.x1 - d, x.x2})) / (2 * d) ==
        doctest::Approx(b.velocity(x).x1).epsilon(1e-8));
  CHECK((b.potential({x.x1, x.x2 + d}) - b.potential({x.x1, x.x2 - d})) / (2 * d) ==
        doctest::Approx(b.velocity(x).x2).epsilon(1e-8));
  const Point y = b.flow(x, 0.25);
  CHECK(y.x1 == doctest::Approx(0.3 * std::exp(-0.5)));
  CHECK(y.x2 == doctest::Approx(0.7 * std::exp(0.5)));
  const Point back = b.flow(y, -0.25);
  CHECK(back.x1 == doctest::Approx(x.x1));
  CHECK(strain_eval(2.0, x).x2 == b.velocity(x).x2);
}

TEST_CASE("amplitude selection") {
  CHECK(select_amplitude(6 * kPi, 0.25) == doctest::Approx(96 * kPi));
  CHECK_THROWS_AS(select_amplitude(1, 0), Error);
}

TEST_CASE("heat flow matches the Gaussian heat kernel") {
  const Grid2d g(8, 256);
  const double mass = 4 * kPi, var = 0.25, t = 0.5;
  double out = 0;
  const FieldXd n = heat_flow(g, gaussian(g, mass, var), t, &out);
  const FieldXd exact = gaussian(g, mass, var + 2 * t);
  CHECK((n - exact).abs().maxCoeff() < 1e-10 * exact.maxCoeff());
  CHECK(std::abs(out) < 1e-10 * mass);
}

TEST_CASE("heat flow meters mass leaving the box") {
  const Grid2d g(2, 64);
  const FieldXd n0 = gaussian(g, 1.0, 0.25);
  double out = 0;
  const FieldXd n = heat_flow(g, n0, 0.5, &out);
  const double before = integrate(g, n0), after = integrate(g, n);
  CHECK(out > 0.01);
  CHECK(std::abs(before - after - out) < 1e-13);
}

TEST_CASE("clip_negative keeps mass") {
  const Grid2d g(1, 4);
  FieldXd n = FieldXd::Constant(4, 4, 1.0);
  n(0, 0) = -0.5;
  const double mass = integrate(g, n);
  const double removed = clip_negative(g, n);
  CHECK(removed == doctest::Approx(0.5 * g.cell_area()));
  CHECK(n.minCoeff() >= 0);
  CHECK(integrate(g, n) == doctest::Approx(mass).epsilon(1e-14));
}

TEST_CASE("face velocity and CFL rate for pure strain") {
  const Grid2d g(1, 8);
  const StrainField b{3.0};
  const auto u = face_velocity(g, nullptr, b);
  CHECK(u.ux.rows() == 9);
  CHECK(u.uy.cols() == 9);
  CHECK(u.ux(0, 0) == doctest::Approx(3.0));
  CHECK(u.uy(0, 8) == doctest::Approx(3.0));
  // Worst cell: the corner outflows in x2 at the box edge.
  CHECK(outgoing_rate(g, u) > 0);
}

TEST_CASE("transport rate is conservative up to boundary flux") {
  const Grid2d g(2, 32);
  const FieldXd n = gaussian(g, 1.0, 0.3, 0.4, -0.2);
  const auto u = face_velocity(g, nullptr, StrainField{1.5});
  for (Transport s : {Transport::upwind, Transport::muscl}) {
    double out = 0;
    const FieldXd r = transport_rate(g, n, u, s, &out);
    CHECK(std::abs(integrate(g, r) + out) < 1e-13);
  }
}

TEST_CASE("pure strain advection follows the characteristics") {
  const Grid2d g(4, 256);
  const double a = 1, var = 0.0625, t = 0.5;
  const DensityField n0(g, gaussian(g, 1.0, var, 1.0, 0.5));
  StepOptions opt;
  opt.diffusion = false;
  opt.chemotaxis = false;
  const auto table = build_kernel(2 * g.spacing(), g);
  const StrainField b{a};
  auto s = make_state(n0, table, b, opt);
  while (s.t < t - 1e-14) s = step(std::move(s), table, b, opt, t - s.t);
  const double m = integrate(s.n);
  const Point c = b.flow({1.0, 0.5}, t);
  CHECK(moment(s.n, weights::monomial(1, 0)) / m == doctest::Approx(c.x1).epsilon(2e-3));
  CHECK(moment(s.n, weights::monomial(0, 1)) / m == doctest::Approx(c.x2).epsilon(2e-3));
  // A linear flow maps the Gaussian to one with variances var e^{-2t}, var e^{2t}.
  const double vx = moment(s.n, weights::monomial(2, 0)) / m - c.x1 * c.x1;
  const double vy = moment(s.n, weights::monomial(0, 2)) / m - c.x2 * c.x2;
  CHECK(vx == doctest::Approx(var * std::exp(-2 * a * t)).epsilon(0.05));
  CHECK(vy == doctest::Approx(var * std::exp(2 * a * t)).epsilon(0.05));
}

TEST_CASE("a full step conserves mass, positivity and mirror symmetry") {
  const Grid2d g(4, 64);
  FieldXd v = gaussian(g, 6 * kPi, 0.25, 0.3, 1.0) + gaussian(g, 6 * kPi, 0.25, 0.3, -1.0);
  const DensityField n0(g, v);
  const auto table = build_kernel(2 * g.spacing(), g);
  const StrainField b{5.0};
  for (Transport tr : {Transport::muscl, Transport::upwind}) {
    StepOptions opt;
    opt.transport = tr;
    opt.assert_symmetry = true;
    auto s = make_state(n0, table, b, opt);
    const double m0 = integrate(n0);
    for (int k = 0; k < 40; ++k) {
      s = step(std::move(s), table, b, opt);
      CHECK(std::abs(s.last.interior_drift) <= 1e-12 * m0);
      CHECK(s.n.values.minCoeff() >= 0);
      CHECK(std::abs(integrate(s.n) - m0 + s.outflow) <= 1e-10 * m0);
      CHECK(mirror_symmetry_error(s.n) <= 1e-12 * s.n.values.maxCoeff());
      CHECK(s.last.courant <= opt.cfl * (1 + 1e-12));
    }
    CHECK(s.step_count == 40);
  }
}

TEST_CASE("step size grows at most twofold and respects dt_max") {
  const Grid2d g(4, 32);
  const DensityField n0(g, gaussian(g, 2 * kPi, 0.5));
  const auto table = build_kernel(2 * g.spacing(), g);
  StepOptions opt;
  opt.dt_max = 1e-3;
  auto s = make_state(n0, table, StrainField{}, opt);
  double prev = 0;
  for (int k = 0; k < 10; ++k) {
    s = step(std::move(s), table, StrainField{}, opt);
    CHECK(s.last.dt <= 1e-3);
    if (prev > 0) CHECK(s.last.dt <= 2 * prev);
    prev = s.last.dt;
  }
}

TEST_CASE("step options are validated") {
  StepOptions opt;
  opt.cfl = 0.6;
  CHECK_THROWS_AS(validate(opt), Error);
  opt.transport = Transport::upwind;
  CHECK_NOTHROW(validate(opt));
  opt.cfl = 1.5;
  CHECK_THROWS_AS(validate(opt), Error);
  CHECK(parse_transport("upwind") == Transport::upwind);
  CHECK_THROWS_AS(parse_transport("weno"), Error);
}

TEST_CASE("blow-up detector") {
  const Grid2d g(1, 16);
  BlowupThresholds th;
  FieldXd v = FieldXd::Constant(16, 16, 1.0);
  CHECK(detect_blowup(DensityField(g, v), 1.0, th) == Verdict::healthy);

  FieldXd spike = v;
  spike(5, 5) = 1000;
  CHECK(detect_blowup(DensityField(g, spike), 1.0, th) == Verdict::blown_up);

  // 150x peak holding over a quarter of the mass in a 3x3 block.
  FieldXd block = FieldXd::Constant(16, 16, 0.1);
  block(8, 8) = 150;
  CHECK(max_block_mass(g, block) == doctest::Approx((150 + 8 * 0.1) * g.cell_area()));
  CHECK(detect_blowup(DensityField(g, block), 1.0, th) == Verdict::blown_up);
  block(8, 8) = 99;
  CHECK(detect_blowup(DensityField(g, block), 1.0, th) == Verdict::healthy);

  BlowupDetector det(1.0, th, true);
  for (int k = 0; k < 6; ++k) det.observe_second_moment(k, 10.0 - k);
  CHECK(det.trend_negative());
  CHECK(det.assess(DensityField(g, v)) == Verdict::suspected);
  BlowupDetector sub(1.0, th, false);
  for (int k = 0; k < 6; ++k) sub.observe_second_moment(k, 10.0 - k);
  CHECK(sub.assess(DensityField(g, v)) == Verdict::healthy);
  det.observe_second_moment(6, 11.0);
  CHECK_FALSE(det.trend_negative());
  CHECK(to_string(Verdict::blown_up) == "blown_up");
}
