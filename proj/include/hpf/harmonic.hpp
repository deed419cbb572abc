#pragma once

// Harmonic-domain primitives: index sets, stacked spectra, block-Toeplitz
// operators, the lifted time derivative and the Park transform.
//
// Stacking convention (used everywhere in the library): a multi-channel
// spectrum is stored harmonic-major, i.e. entry (channel c, order h) lives at
// position (h + h_max) * channels + c.  Lifted operators follow the same
// convention on both sides, so block (m, k) of an operator is the
// out_channels x in_channels matrix coupling order k into order m.

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace hpf {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using SparseMatrixC = Eigen::SparseMatrix<Complex>;

inline constexpr double kPi = 3.14159265358979323846;

class HarmonicIndexSet {
 public:
  HarmonicIndexSet(double f1 = 50.0, int h_max = 25);

  double f1() const { return f1_; }
  double period() const { return 1.0 / f1_; }
  int h_max() const { return h_max_; }
  int size() const { return 2 * h_max_ + 1; }

  bool contains(int h) const { return h >= -h_max_ && h <= h_max_; }
  int position(int h) const { return h + h_max_; }
  int order(int position) const { return position - h_max_; }
  double frequency(int h) const { return h * f1_; }
  double angular_frequency(int h) const { return 2.0 * kPi * h * f1_; }
  std::vector<int> orders() const;

  bool operator==(const HarmonicIndexSet& other) const {
    return f1_ == other.f1_ && h_max_ == other.h_max_;
  }

 private:
  double f1_;
  int h_max_;
};

class HarmonicSignal {
 public:
  HarmonicSignal() : HarmonicSignal(HarmonicIndexSet(), 1) {}
  HarmonicSignal(const HarmonicIndexSet& set, int channels);
  HarmonicSignal(const HarmonicIndexSet& set, int channels, VectorXcd stacked);

  const HarmonicIndexSet& index_set() const { return set_; }
  int channels() const { return channels_; }

  Complex operator()(int channel, int h) const { return coeffs_(index(channel, h)); }
  Complex& operator()(int channel, int h) { return coeffs_(index(channel, h)); }

  const VectorXcd& stacked() const { return coeffs_; }
  VectorXcd& stacked() { return coeffs_; }

  // Largest |X(c, h) - conj(X(c, -h))| over all channels and orders.
  double conjugate_asymmetry() const;
  bool is_real(double tolerance = 1e-9) const;
  // Orthogonal projection onto conjugate-symmetric spectra.
  void make_real();

  HarmonicSignal slice(int first_channel, int count) const;
  void assign(int first_channel, const HarmonicSignal& part);
  // Same channels on another index set: truncates or zero-pads.
  HarmonicSignal on(const HarmonicIndexSet& other) const;

  // Real waveform value of channel c at time t.
  double evaluate(int channel, double t) const;

  std::size_t index(int channel, int h) const {
    return static_cast<std::size_t>(set_.position(h)) * channels_ + channel;
  }

 private:
  HarmonicIndexSet set_;
  int channels_;
  VectorXcd coeffs_;
};

HarmonicSignal concatenate(const std::vector<HarmonicSignal>& parts);

// Fourier coefficients h -> (rows x cols) of a periodic matrix A(t).
struct FourierMatrix {
  int rows = 0;
  int cols = 0;
  std::map<int, MatrixXcd> coeffs;

  FourierMatrix() = default;
  FourierMatrix(int r, int c) : rows(r), cols(c) {}

  // Block at order h, created as zeros on first access.
  MatrixXcd& at(int h);
  const MatrixXcd* find(int h) const;
  bool is_zero() const;

  FourierMatrix& operator+=(const FourierMatrix& other);
  FourierMatrix operator*(const FourierMatrix& other) const;  // time-domain product
};

FourierMatrix operator+(FourierMatrix a, const FourierMatrix& b);
FourierMatrix constant_matrix(const MatrixXcd& value);

class HarmonicOperator {
 public:
  HarmonicOperator(const HarmonicIndexSet& set, int out_channels, int in_channels, MatrixXcd dense);

  const HarmonicIndexSet& index_set() const { return set_; }
  int out_channels() const { return out_; }
  int in_channels() const { return in_; }
  const MatrixXcd& matrix() const { return dense_; }

  // Block coupling order k (input) into order m (output).
  MatrixXcd block(int m, int k) const;
  bool is_block_toeplitz(double tolerance = 0.0) const;

 private:
  HarmonicIndexSet set_;
  int out_;
  int in_;
  MatrixXcd dense_;
};

// Block-Toeplitz operator with block(m, k) = coeffs(m - k), zero where absent.
HarmonicOperator toeplitz_from_coeffs(const std::map<int, MatrixXcd>& coeffs, const HarmonicIndexSet& set);
HarmonicOperator toeplitz_from_coeffs(const FourierMatrix& coeffs, const HarmonicIndexSet& set);

// Truncated spectral convolution y = A x.
HarmonicSignal apply(const HarmonicOperator& op, const HarmonicSignal& x);

// Block diagonal j*2*pi*f_h*I: the harmonic-domain image of d/dt.
HarmonicOperator derivative_operator(const HarmonicIndexSet& set, int channels);

enum class ParkDirection { AbcToDq, DqToAbc };

// Fourier coefficients of the power-invariant Park matrix with
// theta = 2*pi*f1*t.  D row: sqrt(2/3)*cos(theta - 2*pi*k/3), Q row:
// sqrt(2/3)*sin(theta - 2*pi*k/3), k = 0, 1, 2 for phases A, B, C.  The
// zero-sequence row is omitted, so DqToAbc is the transpose (2 -> 3 channels).
FourierMatrix park_coefficients(ParkDirection direction);
HarmonicOperator park_operator(const HarmonicIndexSet& set, ParkDirection direction);

// Sparse lifted block-Toeplitz matrix; coefficients outside
// {-2h_max, ..., 2h_max} never contribute and are skipped.
SparseMatrixC lift(const FourierMatrix& coeffs, const HarmonicIndexSet& set);
SparseMatrixC lifted_derivative(const HarmonicIndexSet& set, int channels);

// Truncated product of two periodic signals.  A one-channel factor is
// broadcast over the other's channels.
HarmonicSignal multiply(const HarmonicSignal& a, const HarmonicSignal& b);

// Spectrum of a constant (h = 0 only) multi-channel value.
HarmonicSignal constant_signal(const HarmonicIndexSet& set, const Eigen::VectorXd& value);

// Balanced set cos(h*(2*pi*f1*t - 2*pi*k/3) + phase) * peak on three channels.
HarmonicSignal balanced_set(const HarmonicIndexSet& set, int h, double peak, double phase);

}  // namespace hpf
