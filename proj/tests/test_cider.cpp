#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "hpf/cider.hpp"
#include "hpf/error.hpp"
#include "hpf/oracle.hpp"
#include "hpf/scenario.hpp"

using namespace hpf;

namespace {

Complex at0(const FourierMatrix& m, int r, int c) {
  const MatrixXcd* b = m.find(0);
  return b ? (*b)(r, c) : Complex(0.0);
}

// Closed-loop i_eps channel evaluated from the hardware output equation.
double i_eps_of(const LtpModel& m, double v_delta, double p_over_v) {
  return (at0(m.c.invariant, 13, 9) * v_delta + at0(m.f.invariant, 13, 3) * p_over_v).real();
}

HarmonicSignal distorted_grid(const HarmonicIndexSet& set) {
  HarmonicSignal v = balanced_set(set, 1, 230.0 * std::sqrt(2.0), 0.0);
  v.stacked() += balanced_set(set, 5, 0.04 * 325.0, 0.3).stacked();
  v.stacked() += balanced_set(set, 7, 0.03 * 325.0, -0.6).stacked();
  return v;
}

}  // namespace

TEST_CASE("dc-side current source at and off the setpoint") {
  const CiderParams p;
  const Setpoints sp{50e3, 16.4e3, 900.0};
  const LtpModel m = build_power_hardware(p, sp, nullptr);
  CHECK(m.nx == 10);
  CHECK(m.ny == 14);
  CHECK(m.nw == 7);
  CHECK(i_eps_of(m, 900.0, 50e3 / 900.0) == doctest::Approx(55.5556).epsilon(1e-5));
  CHECK(i_eps_of(m, 910.0, 50e3 / 900.0) == doctest::Approx(54.9383).epsilon(1e-5));
  // without an operating point the dependent part is empty
  CHECK(m.a.dependent.is_zero());
  CHECK(m.b.dependent.is_zero());
  CHECK(m.e.dependent.is_zero());
}

TEST_CASE("zero operating point gives zero dependent coefficients") {
  const HarmonicIndexSet set(50.0, 3);
  OperatingPoint op{HarmonicSignal(set, 3), HarmonicSignal(set, 3), HarmonicSignal(set, 1)};
  const LtpModel m = build_power_hardware(CiderParams{}, Setpoints{}, &op);
  CHECK(m.a.dependent.is_zero());
  CHECK(m.b.dependent.is_zero());
  CHECK(m.e.dependent.is_zero());
  OperatingPoint bad{HarmonicSignal(set, 2), HarmonicSignal(set, 3), HarmonicSignal(set, 1)};
  CHECK_THROWS_AS(build_power_hardware(CiderParams{}, Setpoints{}, &bad), Error);
}

TEST_CASE("actuator coefficients follow the operating point") {
  const HarmonicIndexSet set(50.0, 3);
  const CiderParams p;
  const Setpoints sp;
  OperatingPoint op{balanced_set(set, 1, 325.0, 0.0), balanced_set(set, 1, 100.0, 0.2), HarmonicSignal(set, 1)};
  op.v_dc(0, 0) = 900.0;
  const LtpModel m = build_power_hardware(p, sp, &op);
  // d i_alpha,a / d v_delta carries v*_alpha,a / (L V*)
  const MatrixXcd* b1 = m.a.dependent.find(1);
  REQUIRE(b1 != nullptr);
  CHECK(std::abs((*b1)(0, 9) - op.v_ref_abc(0, 1) / (p.l_alpha * 900.0)) < 1e-9);
  CHECK(std::abs(at0(m.b.dependent, 0, 0) - 900.0 / (p.l_alpha * 900.0)) < 1e-9);
}

TEST_CASE("ac-only variants") {
  const CiderParams p;
  const LtpModel hw = build_power_hardware_ac_only(p);
  CHECK(hw.nx == 9);
  CHECK(hw.ny == 12);
  CHECK(hw.nw == 3);
  CHECK(at0(hw.b.invariant, 0, 0).real() == doctest::Approx(1.0 / p.l_alpha));
  const LtpModel ctl = build_control_software_ac_only(p);
  CHECK(ctl.nx == 6);
  CHECK(ctl.nu == 8);
}

TEST_CASE("single control stage coefficients") {
  // Only the alpha stage: everything upstream is feed-forward of the reference.
  CiderParams p;
  p.phi = {0.0, 1.0, 0.0, 1.0};
  p.gamma = {0.0, 1.0, 0.0, 1.0};
  p.alpha = {2.0, 0.5, 0.7, 0.3};
  const LtpModel m = build_control_software_ac_only(p);
  // u: 0-1 i_alpha, 2-3 v_phi, 4-5 i_gamma, 6-7 v_gamma; w: 0 i*_D
  CHECK(at0(m.f.invariant, 0, 0).real() == doctest::Approx(2.3));   // k_ff + k_fb
  CHECK(at0(m.d.invariant, 0, 0).real() == doctest::Approx(-2.0));  // -k_fb on i_alpha
  CHECK(at0(m.d.invariant, 0, 2).real() == doctest::Approx(0.7));   // feed-through of v_phi
  CHECK(at0(m.c.invariant, 0, 0).real() == doctest::Approx(4.0));   // k_fb / t_fb
  // integrator: d x1 / dt = ref - meas
  CHECK(at0(m.e.invariant, 0, 0).real() == doctest::Approx(1.0));
  CHECK(at0(m.b.invariant, 0, 0).real() == doctest::Approx(-1.0));
  CHECK(at0(m.a.invariant, 0, 0).real() == doctest::Approx(0.0));
}

TEST_CASE("dc loop feed-through to the actuator reference") {
  const CiderParams p;
  const LtpModel m = build_control_software(p);
  const double kffb_a = p.k_ff_alpha() + p.alpha.k_fb;
  const double kffb_p = p.k_ff_phi() + p.phi.k_fb;
  const double kffb_g = p.k_ff_gamma() + p.gamma.k_fb;
  const double expected = -kffb_a * kffb_p * kffb_g * p.k_fb_delta_signed();
  CHECK(at0(m.d.invariant, 0, 6).real() == doctest::Approx(expected).epsilon(1e-12));
  CHECK(at0(m.d.invariant, 1, 6).real() == 0.0);
  // a higher DC voltage pushes more current into the grid
  CHECK(expected > 0.0);
}

TEST_CASE("scalar closed loop against its transfer function") {
  const HarmonicIndexSet set(50.0, 4);
  // pi: x' = -x + b*u + w, y = x ; kappa: x' = -x, y = 0
  LtpModel pi(1, 1, 1, 1), kappa(1, 1, 1, 1);
  pi.a.invariant.at(0)(0, 0) = -1.0;
  pi.e.invariant.at(0)(0, 0) = 1.0;
  pi.c.invariant.at(0)(0, 0) = 1.0;
  kappa.a.invariant.at(0)(0, 0) = -1.0;
  FourierMatrix t(2, 2);
  t.at(0).setZero();
  HarmonicSignal w(set, 2);
  for (int h = -4; h <= 4; ++h) w(0, h) = 1.0;

  const GridResponse open(pi, kappa, t, set);
  const HarmonicSignal y_open = open.respond(w);
  // self-feedback u = y with b = -1: x' = -2x + w
  pi.b.invariant.at(0)(0, 0) = -1.0;
  t.at(0)(0, 0) = 1.0;
  const GridResponse closed(pi, kappa, t, set);
  const HarmonicSignal y_closed = closed.respond(w);
  for (int h = -4; h <= 4; ++h) {
    const Complex jw(0.0, 2.0 * kPi * 50.0 * h);
    CHECK(std::abs(y_open(0, h) - 1.0 / (1.0 + jw)) < 1e-14);
    CHECK(std::abs(y_closed(0, h) - 1.0 / (2.0 + jw)) < 1e-14);
    CHECK(std::abs(y_closed(1, h)) == 0.0);
  }
  // gain() agrees with respond()
  const MatrixXcd g = closed.gain(0, 1, 0, 1);
  for (int h = -4; h <= 4; ++h) CHECK(std::abs(g(set.position(h), set.position(h)) - y_closed(0, h)) < 1e-14);
  CHECK(g.imag().trace() != 0.0);
  CHECK(std::abs(g(set.position(1), set.position(0))) == 0.0);
}

TEST_CASE("time-invariant hardware response is block diagonal") {
  const HarmonicIndexSet set(50.0, 5);
  const LtpModel hw = build_power_hardware_ac_only(CiderParams{});
  LtpModel inert(1, 1, 1, 1);
  inert.a.invariant.at(0)(0, 0) = -1.0;
  FourierMatrix t(hw.nu + 1, hw.ny + 1);
  t.at(0).setZero();
  const GridResponse r(hw, inert, t, set);
  const MatrixXcd g = r.gain(0, 3, 0, 3);
  CHECK(g.allFinite());
  for (int m = -5; m <= 5; ++m)
    for (int k = -5; k <= 5; ++k)
      if (m != k) CHECK(g.block(3 * set.position(m), 3 * set.position(k), 3, 3).norm() == 0.0);
  CHECK(g.block(3 * set.position(1), 3 * set.position(1), 3, 3).norm() > 0.0);
}

TEST_CASE("open-loop integrators are rejected") {
  const HarmonicIndexSet set(50.0, 2);
  const LtpModel hw = build_power_hardware_ac_only(CiderParams{});
  const LtpModel ctl = build_control_software_ac_only(CiderParams{});
  FourierMatrix t(hw.nu + ctl.nu, hw.ny + ctl.ny);
  t.at(0).setZero();
  try {
    GridResponse r(hw, ctl, t, set);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Model);
  }
}

TEST_CASE("taylor reciprocal") {
  const HarmonicIndexSet set(50.0, 6);
  HarmonicSignal c(set, 1);
  c(0, 0) = 4.0;
  const ReciprocalResult rc = taylor_reciprocal(c, 1.0);
  CHECK(std::abs(rc.value(0, 0) - 0.25) < 1e-16);
  CHECK(rc.value.stacked().norm() == doctest::Approx(0.25));

  // 5% second harmonic against the sampled exact reciprocal
  const double v0 = 400.0, eps = 0.05;
  HarmonicSignal v(set, 1);
  v(0, 0) = v0;
  v(0, 2) = v(0, -2) = 0.5 * eps * v0;
  const ReciprocalResult r = taylor_reciprocal(v, 1.0);
  const int n = 2048;
  for (int h = 0; h <= 6; ++h) {
    Complex ref = 0.0;
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * kPi * k / n;
      ref += std::polar(1.0, -h * th) / (v0 * (1.0 + eps * std::cos(2.0 * th)));
    }
    ref /= double(n);
    CHECK(std::abs(r.value(0, h) - ref) * v0 < 2e-4);
  }
  CHECK(r.value.is_real(1e-18));

  // Jacobian against central differences
  std::mt19937_64 g(1);
  std::normal_distribution<double> nd;
  HarmonicSignal dv(set, 1);
  for (int h = -6; h <= 6; ++h) dv(0, h) = Complex(nd(g), nd(g));
  const double step = 1e-3;
  HarmonicSignal vp = v, vm = v;
  vp.stacked() += step * dv.stacked();
  vm.stacked() -= step * dv.stacked();
  const VectorXcd fd = (taylor_reciprocal(vp, 1.0).value.stacked() - taylor_reciprocal(vm, 1.0).value.stacked()) / (2 * step);
  const VectorXcd an = r.jacobian * dv.stacked();
  CHECK((fd - an).norm() / an.norm() < 1e-6);

  HarmonicSignal tiny(set, 1);
  tiny(0, 0) = 1e-6;
  try {
    taylor_reciprocal(tiny, 1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Degenerate);
  }
  CHECK_THROWS_AS(taylor_reciprocal(HarmonicSignal(set, 2), 1.0), Error);
}

TEST_CASE("q-current reference") {
  const HarmonicIndexSet set(50.0, 4);
  const HarmonicSignal v = balanced_set(set, 1, 230.0 * std::sqrt(2.0), 0.0);
  const ReciprocalResult r = reference_q_current(v, 16.4e3);
  CHECK(std::abs(r.value(0, 0) - 16.4e3 / (std::sqrt(3.0) * 230.0)) < 1e-9);
  const ReciprocalResult z = reference_q_current(v, 0.0);
  CHECK(z.value.stacked().norm() == 0.0);
  CHECK(z.jacobian.norm() == 0.0);
  CHECK_THROWS_AS(reference_q_current(HarmonicSignal(set, 3), 1.0), Error);
}

TEST_CASE("thevenin response") {
  const Scenario s = load_scenario(std::string(HPF_SCENARIO_DIR) + "/single_cider_te.json");
  const TheveninSpec& te = s.thevenin.front();
  const HarmonicIndexSet set(50.0, 25);
  const HarmonicSignal v0 = thevenin_response(HarmonicSignal(set, 3), te);
  const double peak = 230.0 * std::sqrt(2.0);
  CHECK(std::abs(v0(0, 5)) == doctest::Approx(0.5 * 0.06 * peak));
  CHECK(std::arg(v0(0, 5)) == doctest::Approx(kPi / 8.0));
  CHECK(std::abs(v0(0, 7)) == doctest::Approx(0.5 * 0.05 * peak));
  CHECK(std::abs(v0(0, 11)) == doctest::Approx(0.5 * 0.035 * peak));
  CHECK(std::abs(v0(0, 2)) == 0.0);
  HarmonicSignal i(set, 3);
  i(1, 7) = Complex(3.0, -1.0);
  const HarmonicSignal v = thevenin_response(i, te);
  CHECK(std::abs(v0(1, 7) - v(1, 7) - te.impedance(7) * i(1, 7)) < 1e-12);
  CHECK(std::abs(v(0, 7) - v0(0, 7)) == 0.0);
}

TEST_CASE("converter response keeps real spectra and is linear in w") {
  const HarmonicIndexSet set(50.0, 8);
  GridFollowingCider c("c", "n", CiderParams{}, Setpoints{}, true, set);
  const HarmonicSignal v = distorted_grid(set);
  CHECK(c.outputs(v).conjugate_asymmetry() < 1e-8);

  HarmonicSignal w1 = c.disturbance(v), w2 = c.disturbance(balanced_set(set, 1, 300.0, 0.1));
  HarmonicSignal mix(set, w1.channels());
  mix.stacked() = 0.3 * w1.stacked() - 1.7 * w2.stacked();
  const VectorXcd lhs = c.response().respond(mix).stacked();
  const VectorXcd rhs = 0.3 * c.response().respond(w1).stacked() - 1.7 * c.response().respond(w2).stacked();
  CHECK((lhs - rhs).norm() / rhs.norm() < 1e-12);
}

TEST_CASE("flat start operating point") {
  const HarmonicIndexSet set(50.0, 3);
  const Setpoints sp{50e3, 16.4e3, 900.0};
  GridFollowingCider c("c", "n", CiderParams{}, sp, true, set);
  const OperatingPoint op = c.flat_start();
  // balanced phase current with RMS |S| / (3 V)
  CHECK(std::abs(op.i_alpha(0, 1)) * std::sqrt(2.0) == doctest::Approx(std::hypot(50e3, 16.4e3) / 690.0));
  CHECK(op.v_dc(0, 0).real() == 900.0);
  CHECK(op.i_alpha.is_real(1e-12));
  CHECK_THROWS_AS(GridFollowingCider("c", "n", CiderParams{.l_alpha = 0.0}, sp, true, set), Error);
}

TEST_CASE("actuator is lossless") {
  TdsCider spec;
  spec.name = "c";
  spec.node = "n";
  const TdsCiderModel model(spec, 50.0);
  std::mt19937_64 g(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    double x[TdsCiderModel::kStates], dx[TdsCiderModel::kStates];
    for (int i = 0; i < TdsCiderModel::kStates; ++i) x[i] = 100.0 * u(g);
    x[9] = 900.0 + 50.0 * u(g);
    const Eigen::Vector3d vg(300.0 * u(g), 300.0 * u(g), 300.0 * u(g));
    TdsCiderModel::Diagnostics d;
    model.derivatives(0.0031 * trial, x, vg, dx, &d);
    CHECK(d.v_alpha.dot(d.i_alpha) == doctest::Approx(d.v_delta * d.i_delta).epsilon(1e-12));
    CHECK(d.i_eps == doctest::Approx(50e3 / x[9]));
  }
}
