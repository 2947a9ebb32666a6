#include "eschlab/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "eschlab/errors.hpp"

namespace eschlab {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(ld_ * n, 0.0), pivots_(n, 0) {}

void BandedMatrix::throw_out_of_band() {
  throw std::out_of_range("BandedMatrix: entry outside band");
}

void BandedMatrix::set_zero() {
  std::fill(ab_.begin(), ab_.end(), 0.0);
  factorized_ = false;
}

std::vector<double> BandedMatrix::multiply(std::span<const double> x) const {
  if (factorized_) throw std::logic_error("BandedMatrix::multiply after factorize");
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > kl_ ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    double s = 0.0;
    for (std::size_t j = j0; j <= j1; ++j) s += at(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

void BandedMatrix::factorize() {
  if (factorized_) return;
  std::size_t ju = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t km = std::min(kl_, n_ - 1 - j);
    std::size_t p = 0;
    double best = std::abs(at(j, j));
    for (std::size_t r = 1; r <= km; ++r) {
      const double v = std::abs(at(j + r, j));
      if (v > best) {
        best = v;
        p = r;
      }
    }
    pivots_[j] = j + p;
    if (best == 0.0) {
      throw SingularSystemError("banded LU: zero pivot in column " + std::to_string(j),
                                std::numeric_limits<double>::infinity());
    }
    ju = std::max(ju, std::min(j + ku_ + p, n_ - 1));
    if (p != 0) {
      for (std::size_t c = j; c <= ju; ++c) std::swap(at(j, c), at(j + p, c));
    }
    const double inv = 1.0 / at(j, j);
    for (std::size_t r = 1; r <= km; ++r) at(j + r, j) *= inv;
    for (std::size_t c = j + 1; c <= ju; ++c) {
      const double ujc = at(j, c);
      if (ujc == 0.0) continue;
      for (std::size_t r = 1; r <= km; ++r) at(j + r, c) -= at(j + r, j) * ujc;
    }
  }
  factorized_ = true;
}

void BandedMatrix::solve_in_place(std::span<double> b) const {
  if (!factorized_) throw std::logic_error("BandedMatrix::solve before factorize");
  if (b.size() != n_) throw std::invalid_argument("BandedMatrix::solve: size mismatch");
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t p = pivots_[j];
    if (p != j) std::swap(b[j], b[p]);
    const std::size_t km = std::min(kl_, n_ - 1 - j);
    const double bj = b[j];
    if (bj == 0.0) continue;
    for (std::size_t r = 1; r <= km; ++r) b[j + r] -= at(j + r, j) * bj;
  }
  const std::size_t kv = kl_ + ku_;
  for (std::size_t jj = n_; jj-- > 0;) {
    b[jj] /= at(jj, jj);
    const double bj = b[jj];
    const std::size_t i0 = jj > kv ? jj - kv : 0;
    for (std::size_t i = i0; i < jj; ++i) b[i] -= at(i, jj) * bj;
  }
}

double BandedMatrix::pivot_ratio() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    const double v = std::abs(at(j, j));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace eschlab
