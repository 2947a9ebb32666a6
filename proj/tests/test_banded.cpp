#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "eschlab/banded.hpp"
#include "eschlab/errors.hpp"

using eschlab::BandedMatrix;

namespace {

// Dense Gaussian elimination with partial pivoting, used as the reference.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace

TEST_CASE("banded LU agrees with dense elimination on random band matrices") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + static_cast<std::size_t>(trial) * 3;
    const std::size_t kl = 1 + trial % 3;
    const std::size_t ku = 1 + (trial / 3) % 3;
    BandedMatrix m(n, kl, ku);
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!m.in_band(i, j)) continue;
        // small diagonal forces row interchanges
        const double v = (i == j ? 0.05 : 1.0) * dist(rng);
        m(i, j) = v;
        dense[i][j] = v;
      }
    }
    std::vector<double> b(n);
    for (auto& v : b) v = dist(rng);
    const auto ref = dense_solve(dense, b);
    const auto ax = m.multiply(ref);
    for (std::size_t i = 0; i < n; ++i) CHECK(ax[i] == doctest::Approx(b[i]).epsilon(1e-9));

    m.factorize();
    auto x = b;
    m.solve_in_place(x);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-8));
  }
}

TEST_CASE("banded LU reports singular systems") {
  BandedMatrix m(4, 1, 1);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(3, 3) = 1.0;
  CHECK_THROWS_AS(m.factorize(), eschlab::SingularSystemError);
}

TEST_CASE("entries outside the band are rejected") {
  BandedMatrix m(5, 1, 2);
  CHECK_NOTHROW(m(0, 2));
  CHECK_THROWS_AS(m(0, 3), std::out_of_range);
  CHECK_THROWS_AS(m(2, 0), std::out_of_range);
}
