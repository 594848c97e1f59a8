#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/basis.hpp"
#include "core/distributions.hpp"

namespace gsa {

// Winsorize to [q_{alpha/2}, q_{1-alpha/2}] (interpolated percentiles),
// preserving order and length. alpha = 0 is the identity.
std::vector<double> winsorize(std::span<const double> xs, double alpha);

struct H0Moments {
  Eigen::VectorXd u;      // E[phi_i | H0]
  Eigen::MatrixXd cov0;   // Cov(phi_i, phi_j | H0), denominator n
  std::size_t n_cal = 0;
  double sigma_hat = 0.0;  // sd of the winsorized calibration sample
  // winsorization bounds, frozen as the online preprocessing transform;
  // +-inf when no winsorization was applied
  double winsor_lo = -std::numeric_limits<double>::infinity();
  double winsor_hi = std::numeric_limits<double>::infinity();
};

struct H1Spec {
  Eigen::VectorXd m;     // E[phi_i | H1]
  Eigen::MatrixXd cov1;  // Cov(phi_i, phi_j | H1)
};

enum class MdeMode {
  MeanShiftSigma,  // scalar delta in sigma-hat units, basis moments by shifted re-evaluation
  PerMoment,       // m_i = u_i (1 + delta_i)
  Swap,            // m (and cov1) from basis moments of a reference H1 distribution
};

struct MdeSpec {
  MdeMode mode = MdeMode::MeanShiftSigma;
  double delta = 0.5;                 // MeanShiftSigma
  std::vector<double> per_moment;     // PerMoment
  double var_inflation = 0.0;         // cov1 = cov0 * (1 + var_inflation), non-Swap modes
  Distribution swap_to;               // Swap
  std::size_t swap_n = 0;             // Swap reference-sample size; 0 = match n_cal

  static MdeSpec mean_shift(double delta);
  static MdeSpec per_moment_spec(std::vector<double> deltas);
  static MdeSpec swap(Distribution to);

  void validate() const;
};

enum class SolverLevel { Direct, Ridge, Svd };

struct SolveDiagnostics {
  double cond_f = 0.0;
  SolverLevel solver_level = SolverLevel::Direct;
  double j_s = 0.0;  // K^T Y
  double eta = 0.0;  // K^T Y / sqrt(var0)
  double ridge_lambda_used = 0.0;
};

struct SolverOptions {
  double ridge_lambda = 1e-6;
  double cond_gate_direct = 1e6;
  double cond_gate_ridge = 1e8;
  double svd_cutoff = 1e-10;
};

enum class ThresholdKind { Pe, Vp, Cantelli, Simulation, Arl0Bisect };
enum class RuleKind { Cusum, Grsh, Srp };

// Deployable state of Phase 1 plus diagnostics. threshold is NaN until a
// threshold rule has been applied. The winsorization bounds learned in
// calibration are part of the model: the online statistic is
// lambda(clamp(x, winsor_lo, winsor_hi)), so (e0, var0) describe exactly what
// the detector sees and a raw tail sample cannot jump the threshold in one
// step.
struct CalibratedModel {
  BasisSpec basis;
  std::vector<double> k;
  double k0 = 0.0;
  double e0 = 0.0;
  double var0 = 0.0;
  double threshold = std::numeric_limits<double>::quiet_NaN();
  ThresholdKind threshold_kind = ThresholdKind::Pe;
  RuleKind rule = RuleKind::Cusum;
  bool log1p_input = false;
  double winsor_lo = -std::numeric_limits<double>::infinity();
  double winsor_hi = std::numeric_limits<double>::infinity();
  SolveDiagnostics diagnostics;

  int order() const { return basis.order; }
};

// Column means / covariance of the clipped basis matrix over the winsorized
// sample. Enforces the minimum sizes (30 / 100 / 500 for s = 1 / 2 / >=3).
// When `winsorized_out` is non-null it receives the winsorized sample.
H0Moments estimate_h0(std::span<const double> xs, const BasisSpec& basis, double winsor_alpha,
                      std::vector<double>* winsorized_out = nullptr);

// H1 moment specification from the MDE. MeanShiftSigma re-evaluates the basis
// over the shifted winsorized sample (required for it). Swap draws the
// reference sample from `rng` (required for it).
H1Spec specify_h1_mde(const H0Moments& h0, const BasisSpec& basis, const MdeSpec& mde,
                      std::span<const double> winsorized = {}, Rng* rng = nullptr);

// F = (cov0 + cov1)/2, Y = m - u.
void build_system(const H0Moments& h0, const H1Spec& h1, Eigen::MatrixXd& f, Eigen::VectorXd& y);

// Three-level solve: direct LU below cond_gate_direct, ridge below
// cond_gate_ridge, truncated-SVD pseudoinverse above (or on direct failure).
Eigen::VectorXd solve_fk(const Eigen::MatrixXd& f, const Eigen::VectorXd& y,
                         const SolverOptions& opts, SolveDiagnostics& diag);

double offset_k0(const Eigen::VectorXd& k, const Eigen::VectorXd& u, const Eigen::VectorXd& m);

struct LlrStats {
  double e0 = 0.0;
  double var0 = 0.0;
  double j_s = 0.0;
  double eta = 0.0;
};

LlrStats llr_stats(const Eigen::VectorXd& k, double k0, const H0Moments& h0, const H1Spec& h1);

// Whitening transform W with W cov0 W^T = I (eigen path, ridge 1e-10 on
// near-zero eigenvalues). Diagnostic-only; not on the online path.
Eigen::MatrixXd orthonormalize(const H0Moments& h0);

struct CalibrationOptions {
  double winsor_alpha = 0.10;
  SolverOptions solver;
};

// Full Phase-1 moment pipeline (threshold left NaN).
CalibratedModel calibrate(std::span<const double> xs, const BasisSpec& basis, const MdeSpec& mde,
                          const CalibrationOptions& opts = {}, Rng* rng = nullptr);

// Exact-moment mode: moments supplied analytically so identity-level
// invariants can be asserted without MC noise.
CalibratedModel calibrate_exact(const BasisSpec& basis, const Eigen::VectorXd& u,
                                const Eigen::MatrixXd& cov0, const Eigen::VectorXd& m,
                                const Eigen::MatrixXd& cov1, const SolverOptions& opts = {});

struct OrderSelection {
  int chosen = 1;
  std::vector<double> j_values;  // J(1..s_max)
};

// Calibrates at each order 1..s_max on the same sample/MDE; returns the
// smallest s whose next relative gain falls below rel_gain.
OrderSelection select_order(std::span<const double> xs, BasisFamily family, int s_max,
                            double rel_gain, const MdeSpec& mde,
                            const CalibrationOptions& opts = {}, Rng* rng = nullptr);

const char* to_string(SolverLevel level);
const char* to_string(ThresholdKind kind);
const char* to_string(RuleKind rule);
const char* to_string(BasisFamily family);

}  // namespace gsa
