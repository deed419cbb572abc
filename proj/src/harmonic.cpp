#include "hpf/harmonic.hpp"

#include <cmath>
#include <string>

#include "hpf/error.hpp"

namespace hpf {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Structural: return "structural";
    case ErrorKind::Assembly: return "assembly";
    case ErrorKind::Reduction: return "reduction";
    case ErrorKind::Partition: return "partition";
    case ErrorKind::Model: return "model";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::Windowing: return "windowing";
    case ErrorKind::Instability: return "instability";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

HarmonicIndexSet::HarmonicIndexSet(double f1, int h_max) : f1_(f1), h_max_(h_max) {
  if (!(f1 > 0.0)) throw Error(ErrorKind::Structural, "fundamental frequency must be positive");
  if (h_max < 0) throw Error(ErrorKind::Structural, "h_max must be non-negative");
}

std::vector<int> HarmonicIndexSet::orders() const {
  std::vector<int> out;
  out.reserve(size());
  for (int h = -h_max_; h <= h_max_; ++h) out.push_back(h);
  return out;
}

HarmonicSignal::HarmonicSignal(const HarmonicIndexSet& set, int channels)
    : set_(set), channels_(channels), coeffs_(VectorXcd::Zero(static_cast<Eigen::Index>(set.size()) * channels)) {
  if (channels <= 0) throw Error(ErrorKind::Structural, "signal needs at least one channel");
}

HarmonicSignal::HarmonicSignal(const HarmonicIndexSet& set, int channels, VectorXcd stacked)
    : set_(set), channels_(channels), coeffs_(std::move(stacked)) {
  if (channels <= 0) throw Error(ErrorKind::Structural, "signal needs at least one channel");
  if (coeffs_.size() != static_cast<Eigen::Index>(set.size()) * channels)
    throw Error(ErrorKind::Structural, "stacked vector length " + std::to_string(coeffs_.size()) +
                                           " does not match " + std::to_string(set.size() * channels));
}

double HarmonicSignal::conjugate_asymmetry() const {
  double worst = 0.0;
  for (int h = 0; h <= set_.h_max(); ++h)
    for (int c = 0; c < channels_; ++c)
      worst = std::max(worst, std::abs((*this)(c, h) - std::conj((*this)(c, -h))));
  return worst;
}

bool HarmonicSignal::is_real(double tolerance) const {
  const double scale = std::max(1.0, coeffs_.cwiseAbs().maxCoeff());
  return conjugate_asymmetry() <= tolerance * scale;
}

void HarmonicSignal::make_real() {
  for (int h = 0; h <= set_.h_max(); ++h)
    for (int c = 0; c < channels_; ++c) {
      const Complex avg = 0.5 * ((*this)(c, h) + std::conj((*this)(c, -h)));
      (*this)(c, h) = avg;
      (*this)(c, -h) = std::conj(avg);
    }
}

HarmonicSignal HarmonicSignal::slice(int first_channel, int count) const {
  if (first_channel < 0 || count <= 0 || first_channel + count > channels_)
    throw Error(ErrorKind::Structural, "channel slice out of range");
  HarmonicSignal out(set_, count);
  for (int h = -set_.h_max(); h <= set_.h_max(); ++h)
    for (int c = 0; c < count; ++c) out(c, h) = (*this)(first_channel + c, h);
  return out;
}

void HarmonicSignal::assign(int first_channel, const HarmonicSignal& part) {
  if (!(part.set_ == set_)) throw Error(ErrorKind::Structural, "index sets differ");
  if (first_channel < 0 || first_channel + part.channels_ > channels_)
    throw Error(ErrorKind::Structural, "channel assignment out of range");
  for (int h = -set_.h_max(); h <= set_.h_max(); ++h)
    for (int c = 0; c < part.channels_; ++c) (*this)(first_channel + c, h) = part(c, h);
}

HarmonicSignal HarmonicSignal::on(const HarmonicIndexSet& other) const {
  if (other.f1() != set_.f1()) throw Error(ErrorKind::Structural, "fundamental frequencies differ");
  HarmonicSignal out(other, channels_);
  const int common = std::min(other.h_max(), set_.h_max());
  for (int h = -common; h <= common; ++h)
    for (int c = 0; c < channels_; ++c) out(c, h) = (*this)(c, h);
  return out;
}

double HarmonicSignal::evaluate(int channel, double t) const {
  Complex sum = 0.0;
  for (int h = -set_.h_max(); h <= set_.h_max(); ++h)
    sum += (*this)(channel, h) * std::polar(1.0, set_.angular_frequency(h) * t);
  return sum.real();
}

HarmonicSignal concatenate(const std::vector<HarmonicSignal>& parts) {
  if (parts.empty()) throw Error(ErrorKind::Structural, "nothing to concatenate");
  int total = 0;
  for (const auto& p : parts) {
    if (!(p.index_set() == parts.front().index_set())) throw Error(ErrorKind::Structural, "index sets differ");
    total += p.channels();
  }
  HarmonicSignal out(parts.front().index_set(), total);
  int offset = 0;
  for (const auto& p : parts) {
    out.assign(offset, p);
    offset += p.channels();
  }
  return out;
}

MatrixXcd& FourierMatrix::at(int h) {
  auto it = coeffs.find(h);
  if (it == coeffs.end()) it = coeffs.emplace(h, MatrixXcd::Zero(rows, cols)).first;
  return it->second;
}

const MatrixXcd* FourierMatrix::find(int h) const {
  auto it = coeffs.find(h);
  return it == coeffs.end() ? nullptr : &it->second;
}

bool FourierMatrix::is_zero() const {
  for (const auto& [h, m] : coeffs)
    if (m.size() > 0 && m.cwiseAbs().maxCoeff() != 0.0) return false;
  return true;
}

FourierMatrix& FourierMatrix::operator+=(const FourierMatrix& other) {
  if (other.rows != rows || other.cols != cols) throw Error(ErrorKind::Structural, "coefficient block sizes differ");
  for (const auto& [h, m] : other.coeffs) at(h) += m;
  return *this;
}

FourierMatrix FourierMatrix::operator*(const FourierMatrix& other) const {
  if (cols != other.rows) throw Error(ErrorKind::Structural, "coefficient block sizes differ");
  FourierMatrix out(rows, other.cols);
  for (const auto& [ha, a] : coeffs)
    for (const auto& [hb, b] : other.coeffs) out.at(ha + hb) += a * b;
  return out;
}

FourierMatrix operator+(FourierMatrix a, const FourierMatrix& b) {
  a += b;
  return a;
}

FourierMatrix constant_matrix(const MatrixXcd& value) {
  FourierMatrix out(static_cast<int>(value.rows()), static_cast<int>(value.cols()));
  out.coeffs[0] = value;
  return out;
}

HarmonicOperator::HarmonicOperator(const HarmonicIndexSet& set, int out_channels, int in_channels, MatrixXcd dense)
    : set_(set), out_(out_channels), in_(in_channels), dense_(std::move(dense)) {
  if (dense_.rows() != static_cast<Eigen::Index>(set.size()) * out_ ||
      dense_.cols() != static_cast<Eigen::Index>(set.size()) * in_)
    throw Error(ErrorKind::Structural, "operator matrix does not match index set and channels");
}

MatrixXcd HarmonicOperator::block(int m, int k) const {
  return dense_.block(static_cast<Eigen::Index>(set_.position(m)) * out_,
                      static_cast<Eigen::Index>(set_.position(k)) * in_, out_, in_);
}

bool HarmonicOperator::is_block_toeplitz(double tolerance) const {
  const int H = set_.h_max();
  for (int m = -H; m <= H; ++m)
    for (int k = -H; k <= H; ++k) {
      // Compare against the diagonal representative (closest to the corner).
      const int d = m - k;
      const int m0 = d >= 0 ? -H + d : -H;
      const int k0 = m0 - d;
      if ((block(m, k) - block(m0, k0)).cwiseAbs().maxCoeff() > tolerance) return false;
    }
  return true;
}

namespace {

void check_blocks(const std::map<int, MatrixXcd>& coeffs, const HarmonicIndexSet& set, Eigen::Index& rows,
                  Eigen::Index& cols) {
  if (coeffs.empty()) throw Error(ErrorKind::Structural, "no coefficient blocks given");
  rows = coeffs.begin()->second.rows();
  cols = coeffs.begin()->second.cols();
  for (const auto& [h, m] : coeffs) {
    if (m.rows() != rows || m.cols() != cols)
      throw Error(ErrorKind::Structural, "coefficient block at h=" + std::to_string(h) + " has a different shape");
    if (std::abs(h) > 2 * set.h_max())
      throw Error(ErrorKind::Structural, "coefficient order " + std::to_string(h) + " outside +-2*h_max");
  }
}

}  // namespace

HarmonicOperator toeplitz_from_coeffs(const std::map<int, MatrixXcd>& coeffs, const HarmonicIndexSet& set) {
  Eigen::Index r = 0, c = 0;
  check_blocks(coeffs, set, r, c);
  const int H = set.h_max();
  MatrixXcd dense = MatrixXcd::Zero(set.size() * r, set.size() * c);
  for (const auto& [d, blk] : coeffs)
    for (int m = -H; m <= H; ++m) {
      const int k = m - d;
      if (!set.contains(k)) continue;
      dense.block(set.position(m) * r, set.position(k) * c, r, c) = blk;
    }
  return HarmonicOperator(set, static_cast<int>(r), static_cast<int>(c), std::move(dense));
}

HarmonicOperator toeplitz_from_coeffs(const FourierMatrix& coeffs, const HarmonicIndexSet& set) {
  if (coeffs.coeffs.empty())
    return HarmonicOperator(set, coeffs.rows, coeffs.cols,
                            MatrixXcd::Zero(set.size() * coeffs.rows, set.size() * coeffs.cols));
  return toeplitz_from_coeffs(coeffs.coeffs, set);
}

HarmonicSignal apply(const HarmonicOperator& op, const HarmonicSignal& x) {
  if (!(op.index_set() == x.index_set())) throw Error(ErrorKind::Structural, "index sets differ");
  if (op.in_channels() != x.channels()) throw Error(ErrorKind::Structural, "operator input width differs from signal");
  return HarmonicSignal(op.index_set(), op.out_channels(), op.matrix() * x.stacked());
}

HarmonicOperator derivative_operator(const HarmonicIndexSet& set, int channels) {
  return HarmonicOperator(set, channels, channels, MatrixXcd(lifted_derivative(set, channels)));
}

FourierMatrix park_coefficients(ParkDirection direction) {
  const double s = std::sqrt(2.0 / 3.0);
  const Complex j(0.0, 1.0);
  FourierMatrix abc_to_dq(2, 3);
  MatrixXcd& plus = abc_to_dq.at(1);
  MatrixXcd& minus = abc_to_dq.at(-1);
  for (int k = 0; k < 3; ++k) {
    const Complex e = std::polar(1.0, -2.0 * kPi * k / 3.0);  // e^{-j phi_k}
    plus(0, k) = s * 0.5 * e;
    minus(0, k) = s * 0.5 * std::conj(e);
    plus(1, k) = s * e / (2.0 * j);
    minus(1, k) = -s * std::conj(e) / (2.0 * j);
  }
  if (direction == ParkDirection::AbcToDq) return abc_to_dq;
  FourierMatrix dq_to_abc(3, 2);
  for (const auto& [h, m] : abc_to_dq.coeffs) dq_to_abc.at(h) = m.transpose();
  return dq_to_abc;
}

HarmonicOperator park_operator(const HarmonicIndexSet& set, ParkDirection direction) {
  return toeplitz_from_coeffs(park_coefficients(direction), set);
}

SparseMatrixC lift(const FourierMatrix& coeffs, const HarmonicIndexSet& set) {
  const int H = set.h_max();
  const int r = coeffs.rows, c = coeffs.cols;
  std::vector<Eigen::Triplet<Complex>> trip;
  for (const auto& [d, blk] : coeffs.coeffs) {
    if (std::abs(d) > 2 * H) continue;
    if (blk.rows() != r || blk.cols() != c) throw Error(ErrorKind::Structural, "coefficient block shape mismatch");
    for (int m = -H; m <= H; ++m) {
      const int k = m - d;
      if (!set.contains(k)) continue;
      for (int i = 0; i < r; ++i)
        for (int l = 0; l < c; ++l)
          if (blk(i, l) != Complex(0.0)) trip.emplace_back(set.position(m) * r + i, set.position(k) * c + l, blk(i, l));
    }
  }
  SparseMatrixC out(set.size() * r, set.size() * c);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SparseMatrixC lifted_derivative(const HarmonicIndexSet& set, int channels) {
  std::vector<Eigen::Triplet<Complex>> trip;
  for (int h = -set.h_max(); h <= set.h_max(); ++h)
    if (h != 0)
      for (int c = 0; c < channels; ++c)
        trip.emplace_back(set.position(h) * channels + c, set.position(h) * channels + c,
                          Complex(0.0, set.angular_frequency(h)));
  SparseMatrixC out(set.size() * channels, set.size() * channels);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

HarmonicSignal multiply(const HarmonicSignal& a, const HarmonicSignal& b) {
  if (!(a.index_set() == b.index_set())) throw Error(ErrorKind::Structural, "index sets differ");
  const int ch = std::max(a.channels(), b.channels());
  if ((a.channels() != ch && a.channels() != 1) || (b.channels() != ch && b.channels() != 1))
    throw Error(ErrorKind::Structural, "channel counts cannot be broadcast");
  const auto& set = a.index_set();
  const int H = set.h_max();
  HarmonicSignal out(set, ch);
  for (int c = 0; c < ch; ++c) {
    const int ca = a.channels() == 1 ? 0 : c;
    const int cb = b.channels() == 1 ? 0 : c;
    for (int m = -H; m <= H; ++m) {
      Complex sum = 0.0;
      for (int k = std::max(-H, m - H); k <= std::min(H, m + H); ++k) sum += a(ca, m - k) * b(cb, k);
      out(c, m) = sum;
    }
  }
  return out;
}

HarmonicSignal constant_signal(const HarmonicIndexSet& set, const Eigen::VectorXd& value) {
  HarmonicSignal out(set, static_cast<int>(value.size()));
  for (int c = 0; c < value.size(); ++c) out(c, 0) = value(c);
  return out;
}

HarmonicSignal balanced_set(const HarmonicIndexSet& set, int h, double peak, double phase) {
  HarmonicSignal out(set, 3);
  if (h == 0 || !set.contains(h)) return out;
  for (int k = 0; k < 3; ++k) {
    const Complex ph = 0.5 * peak * std::polar(1.0, phase - h * 2.0 * kPi * k / 3.0);
    out(k, h) += ph;
    out(k, -h) += std::conj(ph);
  }
  return out;
}

}  // namespace hpf
