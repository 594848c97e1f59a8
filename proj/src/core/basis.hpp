#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gsa {

enum class BasisFamily { Poly, Log, Frac, Hermite };

constexpr int kMaxOrder = 6;

// Non-constant basis functions phi_1..phi_s. The constant phi_0 is never part
// of the evaluated vector; the offset is carried separately as k0.
struct BasisSpec {
  BasisFamily family = BasisFamily::Poly;
  int order = 2;              // s, count of non-constant functions
  double clip_bound = 10.0;   // phi_max
  std::vector<double> frac_exponents;  // Frac only; strictly decreasing in (0,1)

  static BasisSpec make(BasisFamily family, int order, double clip_bound = 10.0);

  void validate() const;
  // Frac exponents, filling in the harmonic defaults 1/2, 1/3, ... if unset.
  std::vector<double> effective_exponents() const;
};

// Evaluate phi_1..phi_s at x, each clipped to [-phi_max, phi_max].
//   Poly:    x^i
//   Log:     {x, ln|x|, x ln|x|, (ln|x|)^2} truncated to s, |x| floored at 1e-12
//   Frac:    sgn(x) |x|^{alpha_i}
//   Hermite: probabilists' He_i
void eval_basis(const BasisSpec& spec, double x, std::span<double> out);
std::vector<double> eval_basis(const BasisSpec& spec, double x);

// (m4 / m2^2) - 3 with central moments; errors on constant samples.
double excess_kurtosis(std::span<const double> xs);

// Hill tail index over the k largest order statistics of |x|.
double hill_estimator(std::span<const double> xs, std::size_t k);

// Rule-based selection from (kurtosis, Hill index); heavier-tail branch wins
// ties at the rule boundaries. Order defaults to 2 for every family.
BasisSpec select_basis(std::span<const double> xs);

}  // namespace gsa
