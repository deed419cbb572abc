#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hpf/error.hpp"
#include "hpf/harmonic.hpp"

using namespace hpf;

namespace {

// Plain DFT of N uniform samples over one period, order h.
Complex dft(const std::vector<double>& x, int h) {
  Complex acc = 0.0;
  const int n = static_cast<int>(x.size());
  for (int k = 0; k < n; ++k) acc += x[k] * std::polar(1.0, -2.0 * kPi * h * k / n);
  return acc / static_cast<double>(n);
}

Complex dft_c(const std::vector<Complex>& x, int h) {
  Complex acc = 0.0;
  const int n = static_cast<int>(x.size());
  for (int k = 0; k < n; ++k) acc += x[k] * std::polar(1.0, -2.0 * kPi * h * k / n);
  return acc / static_cast<double>(n);
}

// Complex-valued waveform of a (possibly non-symmetric) coefficient set.
Complex synth(const std::map<int, Complex>& c, double theta) {
  Complex v = 0.0;
  for (const auto& [h, x] : c) v += x * std::polar(1.0, h * theta);
  return v;
}

Complex rnd(std::mt19937_64& g) {
  std::normal_distribution<double> n;
  return {n(g), n(g)};
}

}  // namespace

TEST_CASE("index set layout") {
  const HarmonicIndexSet set(50.0, 3);
  CHECK(set.size() == 7);
  CHECK(set.position(-3) == 0);
  CHECK(set.position(3) == 6);
  CHECK(set.order(4) == 1);
  CHECK(set.contains(-3));
  CHECK_FALSE(set.contains(4));
  const auto orders = set.orders();
  for (std::size_t i = 1; i < orders.size(); ++i) CHECK(orders[i] > orders[i - 1]);
  CHECK_THROWS_AS(HarmonicIndexSet(50.0, -1), Error);
  CHECK_THROWS_AS(HarmonicIndexSet(0.0, 5), Error);
}

TEST_CASE("toeplitz of scalar coefficients") {
  const HarmonicIndexSet set(50.0, 1);
  const Complex a(1, 2), b(3, -1), c(-2, 0.5);
  std::map<int, MatrixXcd> coeffs;
  coeffs[-1] = MatrixXcd::Constant(1, 1, a);
  coeffs[0] = MatrixXcd::Constant(1, 1, b);
  coeffs[1] = MatrixXcd::Constant(1, 1, c);
  const HarmonicOperator op = toeplitz_from_coeffs(coeffs, set);
  MatrixXcd expected(3, 3);
  expected << b, a, 0, c, b, a, 0, c, b;
  CHECK((op.matrix() - expected).norm() == doctest::Approx(0.0));
  CHECK(op.is_block_toeplitz());
}

TEST_CASE("identity coefficient gives identity operator") {
  const HarmonicIndexSet set(50.0, 4);
  const HarmonicOperator op = toeplitz_from_coeffs({{0, MatrixXcd::Identity(3, 3)}}, set);
  CHECK((op.matrix() - MatrixXcd::Identity(27, 27)).norm() == 0.0);
  std::mt19937_64 g(3);
  HarmonicSignal x(set, 3);
  for (Eigen::Index i = 0; i < x.stacked().size(); ++i) x.stacked()(i) = rnd(g);
  CHECK((apply(op, x).stacked() - x.stacked()).norm() == 0.0);
}

TEST_CASE("toeplitz rejects bad coefficient sets") {
  const HarmonicIndexSet set(50.0, 2);
  CHECK_THROWS_AS(toeplitz_from_coeffs({{0, MatrixXcd::Identity(2, 2)}, {1, MatrixXcd::Identity(3, 3)}}, set), Error);
  CHECK_THROWS_AS(toeplitz_from_coeffs({{5, MatrixXcd::Identity(2, 2)}}, set), Error);
}

TEST_CASE("cos times cos") {
  const HarmonicIndexSet set(50.0, 3);
  std::map<int, MatrixXcd> coeffs{{-1, MatrixXcd::Constant(1, 1, 0.5)}, {1, MatrixXcd::Constant(1, 1, 0.5)}};
  HarmonicSignal x(set, 1);
  x(0, -1) = x(0, 1) = 0.5;
  const HarmonicSignal y = apply(toeplitz_from_coeffs(coeffs, set), x);
  CHECK(std::abs(y(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(y(0, 2) - 0.25) < 1e-15);
  CHECK(std::abs(y(0, -2) - 0.25) < 1e-15);
  for (int h : {-3, -1, 1, 3}) CHECK(std::abs(y(0, h)) < 1e-15);
}

TEST_CASE("apply matches sampled multiplication") {
  std::mt19937_64 g(11);
  const int hmax = 5, n = 1024;
  const HarmonicIndexSet set(50.0, hmax);
  for (int ch : {1, 3}) {
    std::map<int, MatrixXcd> coeffs;
    for (int h = -2 * hmax; h <= 2 * hmax; ++h) {
      coeffs[h] = MatrixXcd(ch, ch);
      for (int r = 0; r < ch; ++r)
        for (int c = 0; c < ch; ++c) coeffs[h](r, c) = rnd(g);
    }
    HarmonicSignal x(set, ch);
    for (Eigen::Index i = 0; i < x.stacked().size(); ++i) x.stacked()(i) = rnd(g);
    const HarmonicSignal y = apply(toeplitz_from_coeffs(coeffs, set), x);

    double worst = 0.0, scale = 0.0;
    for (int r = 0; r < ch; ++r) {
      std::vector<Complex> samples(n);
      for (int k = 0; k < n; ++k) {
        const double th = 2.0 * kPi * k / n;
        Complex acc = 0.0;
        for (int c = 0; c < ch; ++c) {
          std::map<int, Complex> a, xc;
          for (const auto& [h, m] : coeffs) a[h] = m(r, c);
          for (int h = -hmax; h <= hmax; ++h) xc[h] = x(c, h);
          acc += synth(a, th) * synth(xc, th);
        }
        samples[k] = acc;
      }
      for (int h = -hmax; h <= hmax; ++h) {
        const Complex ref = dft_c(samples, h);
        worst = std::max(worst, std::abs(ref - y(r, h)));
        scale = std::max(scale, std::abs(ref));
      }
    }
    CHECK(worst / scale < 1e-12);
  }
}

TEST_CASE("conjugate-symmetric operator keeps signals real") {
  std::mt19937_64 g(5);
  const HarmonicIndexSet set(50.0, 6);
  std::map<int, MatrixXcd> coeffs;
  for (int h = 0; h <= 4; ++h) {
    MatrixXcd m(3, 3);
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = rnd(g);
    if (h == 0) m = m.real().cast<Complex>();
    coeffs[h] = m;
    if (h > 0) coeffs[-h] = m.conjugate();
  }
  HarmonicSignal x(set, 3);
  for (Eigen::Index i = 0; i < x.stacked().size(); ++i) x.stacked()(i) = rnd(g);
  x.make_real();
  CHECK(x.is_real(1e-15));
  CHECK(apply(toeplitz_from_coeffs(coeffs, set), x).conjugate_asymmetry() < 1e-12);
}

TEST_CASE("toeplitz is linear in its coefficients") {
  std::mt19937_64 g(8);
  const HarmonicIndexSet set(50.0, 3);
  std::map<int, MatrixXcd> c1, c2, mix;
  const Complex a(0.7, -1.3);
  for (int h = -4; h <= 4; ++h) {
    c1[h] = MatrixXcd::Constant(2, 2, rnd(g));
    c2[h] = MatrixXcd::Constant(2, 2, rnd(g));
    mix[h] = a * c1[h] + c2[h];
  }
  const MatrixXcd lhs = toeplitz_from_coeffs(mix, set).matrix();
  const MatrixXcd rhs = a * toeplitz_from_coeffs(c1, set).matrix() + toeplitz_from_coeffs(c2, set).matrix();
  CHECK((lhs - rhs).norm() < 1e-13);
}

TEST_CASE("sparse lift equals dense toeplitz") {
  std::mt19937_64 g(2);
  const HarmonicIndexSet set(50.0, 4);
  FourierMatrix f(2, 3);
  for (int h = -9; h <= 9; ++h)
    for (int i = 0; i < 6; ++i) f.at(h)(i / 3, i % 3) = rnd(g);
  const MatrixXcd sparse = MatrixXcd(lift(f, set));
  FourierMatrix in_band(2, 3);
  for (int h = -8; h <= 8; ++h) in_band.at(h) = f.at(h);
  CHECK((sparse - toeplitz_from_coeffs(in_band, set).matrix()).norm() < 1e-14);
}

TEST_CASE("derivative operator") {
  const HarmonicIndexSet set(50.0, 5);
  const HarmonicOperator d = derivative_operator(set, 2);
  CHECK(d.block(0, 0).norm() == 0.0);
  CHECK((d.block(1, 1) - Complex(0.0, 100.0 * kPi) * MatrixXcd::Identity(2, 2)).norm() < 1e-12);
  CHECK(d.block(1, 0).norm() == 0.0);
  // d/dt sin(w t) = w cos(w t)
  HarmonicSignal s(set, 1);
  s(0, 1) = Complex(0.0, -0.5);
  s(0, -1) = Complex(0.0, 0.5);
  const HarmonicSignal ds = apply(derivative_operator(set, 1), s);
  const double w = 100.0 * kPi;
  CHECK(std::abs(ds(0, 1) - 0.5 * w) < 1e-12);
  CHECK(std::abs(ds(0, -1) - 0.5 * w) < 1e-12);
}

TEST_CASE("park of a balanced positive-sequence set") {
  const HarmonicIndexSet set(50.0, 4);
  const double v = 325.0;
  const HarmonicSignal abc = balanced_set(set, 1, v, 0.0);
  const HarmonicSignal dq = apply(park_operator(set, ParkDirection::AbcToDq), abc);
  CHECK(std::abs(dq(0, 0) - std::sqrt(1.5) * v) < 1e-10);
  CHECK(std::abs(dq(1, 0)) < 1e-10);
  for (int h = 1; h <= 4; ++h) CHECK(std::abs(dq(0, h)) + std::abs(dq(1, h)) < 1e-10);
}

TEST_CASE("park inverse pair on sequence content") {
  const HarmonicIndexSet set(50.0, 8);
  HarmonicSignal abc(set, 3);
  // positive sequence at 1 and 7, negative at 5 (rotation sign follows h)
  for (auto [h, amp, ph] : {std::tuple{1, 300.0, 0.2}, {5, 20.0, 1.1}, {7, 10.0, -0.4}}) {
    const HarmonicSignal b = balanced_set(set, h, amp, ph);
    abc.stacked() += b.stacked();
  }
  const HarmonicSignal back = apply(park_operator(set, ParkDirection::DqToAbc),
                                    apply(park_operator(set, ParkDirection::AbcToDq), abc));
  // interior band only: the edge orders lose their outer neighbours
  for (int h = -set.h_max() + 1; h <= set.h_max() - 1; ++h)
    for (int c = 0; c < 3; ++c) CHECK(std::abs(back(c, h) - abc(c, h)) < 1e-12 * 300.0);
}

TEST_CASE("park of a negative-sequence set against sampled transform") {
  const HarmonicIndexSet set(50.0, 4);
  const double v = 100.0, phase = 0.3;
  HarmonicSignal abc(set, 3);
  const Complex a = std::polar(1.0, 2.0 * kPi / 3.0);
  for (int k = 0; k < 3; ++k) {
    // negative sequence: phase k leads by 2*pi*k/3
    abc(k, 1) = 0.5 * v * std::polar(1.0, phase) * std::pow(a, k);
    abc(k, -1) = std::conj(abc(k, 1));
  }
  const HarmonicSignal dq = apply(park_operator(set, ParkDirection::AbcToDq), abc);
  const int n = 720;
  std::vector<double> d(n), q(n);
  for (int s = 0; s < n; ++s) {
    const double th = 2.0 * kPi * s / n;
    d[s] = q[s] = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double x = v * std::cos(th + phase + 2.0 * kPi * k / 3.0);
      d[s] += std::sqrt(2.0 / 3.0) * std::cos(th - 2.0 * kPi * k / 3.0) * x;
      q[s] += std::sqrt(2.0 / 3.0) * std::sin(th - 2.0 * kPi * k / 3.0) * x;
    }
  }
  for (int h = -4; h <= 4; ++h) {
    CHECK(std::abs(dq(0, h) - dft(d, h)) < 1e-10);
    CHECK(std::abs(dq(1, h) - dft(q, h)) < 1e-10);
    if (std::abs(h) != 2) CHECK(std::abs(dq(0, h)) + std::abs(dq(1, h)) < 1e-10);
  }
  CHECK(std::abs(dq(0, 2)) > 1.0);
}

TEST_CASE("multiply broadcasts a scalar factor") {
  const HarmonicIndexSet set(50.0, 6);
  HarmonicSignal s(set, 1);
  s(0, 0) = 2.0;
  s(0, 2) = s(0, -2) = 0.25;
  const HarmonicSignal abc = balanced_set(set, 1, 1.0, 0.0);
  const HarmonicSignal y = multiply(s, abc);
  CHECK(y.channels() == 3);
  for (double t : {0.0, 0.0013, 0.0071})
    for (int c = 0; c < 3; ++c) CHECK(y.evaluate(c, t) == doctest::Approx(s.evaluate(0, t) * abc.evaluate(c, t)).epsilon(1e-12));
}

TEST_CASE("balanced set evaluates to cosines") {
  const HarmonicIndexSet set(50.0, 7);
  const HarmonicSignal b = balanced_set(set, 5, 2.0, 0.4);
  CHECK(b.is_real(1e-15));
  for (double t : {0.0, 0.0031, 0.017})
    for (int k = 0; k < 3; ++k)
      CHECK(b.evaluate(k, t) == doctest::Approx(2.0 * std::cos(5.0 * (100.0 * kPi * t - 2.0 * kPi * k / 3.0) + 0.4)));
}

TEST_CASE("signal slicing and re-banding") {
  const HarmonicIndexSet set(50.0, 3), wide(50.0, 5);
  HarmonicSignal x(set, 4);
  for (Eigen::Index i = 0; i < x.stacked().size(); ++i) x.stacked()(i) = Complex(double(i), -double(i));
  const HarmonicSignal part = x.slice(1, 2);
  CHECK(part(0, 2) == x(1, 2));
  CHECK(part(1, -3) == x(2, -3));
  const HarmonicSignal up = x.on(wide);
  CHECK(up(3, 3) == x(3, 3));
  CHECK(up(0, 5) == Complex(0.0));
  CHECK(up.on(set).stacked() == x.stacked());
  HarmonicSignal y(set, 4);
  y.assign(1, part);
  CHECK(y(2, 1) == x(2, 1));
  CHECK(y(0, 1) == Complex(0.0));
}
