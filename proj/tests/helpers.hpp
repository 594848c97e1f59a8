#pragma once

// Shared test oracles. Everything here is independent of the implementation
// paths it checks: quadrature for expectations under the normal law, exact
// monomial moments, and an eigendecomposition-based pseudoinverse.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

namespace testutil {

// Gauss-Hermite quadrature for the standard normal weight (probabilists'
// convention): E[f(Z)] = sum w_i f(x_i), exact for polynomials of degree
// <= 2n-1. Golub-Welsch over the He recurrence.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;

  static GaussHermite make(int n) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      double b = std::sqrt(static_cast<double>(i));
      jac(i, i - 1) = b;
      jac(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
    GaussHermite gh;
    gh.nodes.resize(static_cast<std::size_t>(n));
    gh.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      gh.nodes[static_cast<std::size_t>(i)] = eig.eigenvalues()(i);
      double v0 = eig.eigenvectors()(0, i);
      gh.weights[static_cast<std::size_t>(i)] = v0 * v0;
    }
    return gh;
  }

  // E[f(Z + mu)], Z ~ N(0,1)
  double expect(const std::function<double(double)>& f, double mu = 0.0) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i] + mu);
    return acc;
  }
};

// (k-1)!! for even k, 0 for odd: central moments of N(0,1).
inline double normal_central_moment(int k) {
  if (k % 2 == 1) return 0.0;
  double acc = 1.0;
  for (int j = k - 1; j > 1; j -= 2) acc *= j;
  return acc;
}

// E[X^k], X ~ N(mu, 1), by the binomial expansion over central moments.
inline double normal_raw_moment(double mu, int k) {
  double acc = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    acc += binom * std::pow(mu, k - j) * normal_central_moment(j);
    binom = binom * (k - j) / (j + 1.0);
  }
  return acc;
}

// Monomial coefficients of the probabilists' Hermite polynomial He_n
// (index = power of x).
inline std::vector<double> he_coeffs(int n) {
  std::vector<double> prev{1.0};          // He_0
  if (n == 0) return prev;
  std::vector<double> cur{0.0, 1.0};      // He_1
  for (int m = 1; m < n; ++m) {
    std::vector<double> next(cur.size() + 1, 0.0);
    for (std::size_t p = 0; p < cur.size(); ++p) next[p + 1] += cur[p];       // x He_m
    for (std::size_t p = 0; p < prev.size(); ++p) next[p] -= m * prev[p];     // - m He_{m-1}
    prev = cur;
    cur = next;
  }
  return cur;
}

inline std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// E[p(X)], X ~ N(mu,1)
inline double poly_expect(const std::vector<double>& coeffs, double mu) {
  double acc = 0.0;
  for (std::size_t p = 0; p < coeffs.size(); ++p)
    acc += coeffs[p] * normal_raw_moment(mu, static_cast<int>(p));
  return acc;
}

// Exact (u, cov) of the monomial basis x^1..x^s under N(mu,1).
inline void exact_poly_moments(double mu, int s, Eigen::VectorXd& u, Eigen::MatrixXd& cov) {
  u.resize(s);
  cov.resize(s, s);
  for (int i = 1; i <= s; ++i) u(i - 1) = normal_raw_moment(mu, i);
  for (int i = 1; i <= s; ++i)
    for (int j = 1; j <= s; ++j)
      cov(i - 1, j - 1) = normal_raw_moment(mu, i + j) - u(i - 1) * u(j - 1);
}

// Exact (u, cov) of He_1..He_s under N(mu,1).
inline void exact_hermite_moments(double mu, int s, Eigen::VectorXd& u, Eigen::MatrixXd& cov) {
  u.resize(s);
  cov.resize(s, s);
  std::vector<std::vector<double>> he(static_cast<std::size_t>(s) + 1);
  for (int i = 0; i <= s; ++i) he[static_cast<std::size_t>(i)] = he_coeffs(i);
  for (int i = 1; i <= s; ++i) u(i - 1) = poly_expect(he[static_cast<std::size_t>(i)], mu);
  for (int i = 1; i <= s; ++i)
    for (int j = 1; j <= s; ++j) {
      double eij = poly_expect(
          poly_mul(he[static_cast<std::size_t>(i)], he[static_cast<std::size_t>(j)]), mu);
      cov(i - 1, j - 1) = eij - u(i - 1) * u(j - 1);
    }
}

// Pseudoinverse of a symmetric matrix by eigendecomposition; an independent
// route from the JacobiSVD used in the solver.
inline Eigen::MatrixXd sym_pinv(const Eigen::MatrixXd& m, double cutoff = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  Eigen::VectorXd inv = eig.eigenvalues();
  for (Eigen::Index i = 0; i < inv.size(); ++i)
    inv(i) = std::abs(inv(i)) > cutoff ? 1.0 / inv(i) : 0.0;
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace testutil
