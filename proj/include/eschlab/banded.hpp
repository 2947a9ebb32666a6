#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace eschlab {

/// Square band matrix with LU factorisation by partial pivoting.
///
/// Storage follows the LAPACK general-band layout: column j keeps rows
/// j-ku-kl .. j+kl, the extra kl super-diagonals hold fill-in produced by
/// row interchanges.
class BandedMatrix {
public:
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

  std::size_t size() const noexcept { return n_; }
  std::size_t lower() const noexcept { return kl_; }
  std::size_t upper() const noexcept { return ku_; }

  /// Entry (i, j); must lie inside the declared band.
  double& operator()(std::size_t i, std::size_t j) {
    if (!in_band(i, j)) throw_out_of_band();
    return at(i, j);
  }
  double operator()(std::size_t i, std::size_t j) const { return in_band(i, j) ? at(i, j) : 0.0; }
  bool in_band(std::size_t i, std::size_t j) const noexcept {
    if (i >= n_ || j >= n_) return false;
    return i > j ? i - j <= kl_ : j - i <= ku_;
  }

  void set_zero();

  /// y = A x. Only valid before factorize().
  std::vector<double> multiply(std::span<const double> x) const;

  /// In-place LU. Throws SingularSystemError on a zero pivot.
  void factorize();
  bool factorized() const noexcept { return factorized_; }

  /// Solves A x = b using the stored factors; b is overwritten with x.
  void solve_in_place(std::span<double> b) const;

  /// Ratio of largest to smallest |pivot| of U, a cheap conditioning hint.
  double pivot_ratio() const;

private:
  [[noreturn]] static void throw_out_of_band();
  double& at(std::size_t i, std::size_t j) { return ab_[kl_ + ku_ + i - j + j * ld_]; }
  double at(std::size_t i, std::size_t j) const { return ab_[kl_ + ku_ + i - j + j * ld_]; }

  std::size_t n_, kl_, ku_, ld_;
  std::vector<double> ab_;
  std::vector<std::size_t> pivots_;
  bool factorized_ = false;
};

}  // namespace eschlab
