#include "core/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/stats.hpp"

namespace gsa {

std::vector<double> winsorize(std::span<const double> xs, double alpha) {
  if (!(alpha >= 0.0 && alpha < 0.5))
    raise(ErrorKind::InvalidArgument, "winsorization level must lie in [0, 0.5)");
  if (alpha == 0.0) return {xs.begin(), xs.end()};
  if (xs.size() < 10) raise(ErrorKind::InvalidArgument, "winsorization needs at least 10 samples");
  auto sorted = sorted_copy(xs);
  double lo = percentile_sorted(sorted, alpha / 2.0);
  double hi = percentile_sorted(sorted, 1.0 - alpha / 2.0);
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::clamp(xs[i], lo, hi);
  return out;
}

MdeSpec MdeSpec::mean_shift(double delta) {
  MdeSpec m;
  m.mode = MdeMode::MeanShiftSigma;
  m.delta = delta;
  return m;
}

MdeSpec MdeSpec::per_moment_spec(std::vector<double> deltas) {
  MdeSpec m;
  m.mode = MdeMode::PerMoment;
  m.per_moment = std::move(deltas);
  return m;
}

MdeSpec MdeSpec::swap(Distribution to) {
  MdeSpec m;
  m.mode = MdeMode::Swap;
  m.swap_to = std::move(to);
  return m;
}

void MdeSpec::validate() const {
  switch (mode) {
    case MdeMode::MeanShiftSigma:
      if (!std::isfinite(delta)) raise(ErrorKind::InvalidArgument, "MDE delta must be finite");
      if (delta == 0.0)
        raise(ErrorKind::Calibration, "zero MDE: a scalar shift of 0 gives Y = 0");
      break;
    case MdeMode::PerMoment: {
      if (per_moment.empty()) raise(ErrorKind::InvalidArgument, "per-moment MDE needs deltas");
      bool all_zero = true;
      for (double d : per_moment) {
        if (!std::isfinite(d)) raise(ErrorKind::InvalidArgument, "MDE deltas must be finite");
        if (d != 0.0) all_zero = false;
      }
      if (all_zero) raise(ErrorKind::Calibration, "zero MDE: all per-moment deltas are 0");
      break;
    }
    case MdeMode::Swap:
      swap_to.validate();
      break;
  }
  if (!(var_inflation > -1.0))
    raise(ErrorKind::InvalidArgument, "variance inflation must exceed -1");
}

namespace {

std::size_t min_samples_for_order(int s) {
  if (s >= 3) return 500;
  if (s == 2) return 100;
  return 30;
}

// Clipped basis-value matrix over a sample: row j = phi(x_j).
Eigen::MatrixXd basis_matrix(std::span<const double> xs, const BasisSpec& basis) {
  const int s = basis.order;
  Eigen::MatrixXd b(static_cast<Eigen::Index>(xs.size()), s);
  std::vector<double> row(static_cast<std::size_t>(s));
  for (std::size_t j = 0; j < xs.size(); ++j) {
    eval_basis(basis, xs[j], row);
    for (int i = 0; i < s; ++i) b(static_cast<Eigen::Index>(j), i) = row[static_cast<std::size_t>(i)];
  }
  return b;
}

void column_moments(const Eigen::MatrixXd& b, Eigen::VectorXd& u, Eigen::MatrixXd& cov) {
  const auto n = static_cast<double>(b.rows());
  u = b.colwise().mean();
  Eigen::MatrixXd centered = b.rowwise() - u.transpose();
  cov = (centered.transpose() * centered) / n;
}

}  // namespace

H0Moments estimate_h0(std::span<const double> xs, const BasisSpec& basis, double winsor_alpha,
                      std::vector<double>* winsorized_out) {
  basis.validate();
  std::size_t need = min_samples_for_order(basis.order);
  if (xs.size() < need)
    raise(ErrorKind::Calibration,
          "calibration sample too short: order " + std::to_string(basis.order) + " needs n >= " +
              std::to_string(need) + ", got " + std::to_string(xs.size()));
  for (double x : xs)
    if (!std::isfinite(x)) raise(ErrorKind::Numeric, "calibration sample contains non-finite values");

  H0Moments h0;
  h0.n_cal = xs.size();
  std::vector<double> w;
  if (winsor_alpha > 0.0) {
    if (!(winsor_alpha < 0.5))
      raise(ErrorKind::InvalidArgument, "winsorization level must lie in [0, 0.5)");
    if (xs.size() < 10)
      raise(ErrorKind::InvalidArgument, "winsorization needs at least 10 samples");
    auto sorted = sorted_copy(xs);
    h0.winsor_lo = percentile_sorted(sorted, winsor_alpha / 2.0);
    h0.winsor_hi = percentile_sorted(sorted, 1.0 - winsor_alpha / 2.0);
    w.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
      w[i] = std::clamp(xs[i], h0.winsor_lo, h0.winsor_hi);
  } else {
    w.assign(xs.begin(), xs.end());
  }
  h0.sigma_hat = std::sqrt(variance(w));
  Eigen::MatrixXd b = basis_matrix(w, basis);
  column_moments(b, h0.u, h0.cov0);
  if (winsorized_out) *winsorized_out = std::move(w);
  return h0;
}

H1Spec specify_h1_mde(const H0Moments& h0, const BasisSpec& basis, const MdeSpec& mde,
                      std::span<const double> winsorized, Rng* rng) {
  mde.validate();
  const int s = basis.order;
  H1Spec h1;
  switch (mde.mode) {
    case MdeMode::MeanShiftSigma: {
      if (winsorized.empty())
        raise(ErrorKind::InvalidArgument, "scalar-shift MDE needs the calibration sample");
      // Both m and cov1 come from re-evaluating the basis over the shifted
      // sample: exact moment propagation for a location MDE. Keeping
      // cov1 = cov0 instead injects a spurious J(s) gain of order delta^2
      // at s >= 2 (the shifted law has Cov(x, x^2) = 2 delta). The shifted
      // values are clamped back to the winsorization bounds because the
      // online transform will clamp post-change data the same way.
      double shift = mde.delta * h0.sigma_hat;
      std::vector<double> shifted(winsorized.size());
      for (std::size_t j = 0; j < winsorized.size(); ++j)
        shifted[j] = std::clamp(winsorized[j] + shift, h0.winsor_lo, h0.winsor_hi);
      Eigen::MatrixXd b = basis_matrix(shifted, basis);
      column_moments(b, h1.m, h1.cov1);
      h1.cov1 *= 1.0 + mde.var_inflation;
      break;
    }
    case MdeMode::PerMoment: {
      if (mde.per_moment.size() != static_cast<std::size_t>(s))
        raise(ErrorKind::InvalidArgument, "per-moment MDE needs one delta per basis function");
      h1.m = h0.u;
      for (int i = 0; i < s; ++i) h1.m(i) *= 1.0 + mde.per_moment[static_cast<std::size_t>(i)];
      h1.cov1 = h0.cov0 * (1.0 + mde.var_inflation);
      break;
    }
    case MdeMode::Swap: {
      if (!rng) raise(ErrorKind::InvalidArgument, "swap MDE needs an RNG for the reference sample");
      std::size_t n = mde.swap_n > 0 ? mde.swap_n : h0.n_cal;
      std::vector<double> ref = sample(mde.swap_to, n, *rng);
      for (double& v : ref) v = std::clamp(v, h0.winsor_lo, h0.winsor_hi);
      Eigen::MatrixXd b = basis_matrix(ref, basis);
      column_moments(b, h1.m, h1.cov1);
      break;
    }
  }
  return h1;
}

void build_system(const H0Moments& h0, const H1Spec& h1, Eigen::MatrixXd& f, Eigen::VectorXd& y) {
  if (h0.u.size() != h1.m.size())
    raise(ErrorKind::InvalidArgument, "H0/H1 moment dimensions do not match");
  f = 0.5 * (h0.cov0 + h1.cov1);
  y = h1.m - h0.u;
}

Eigen::VectorXd solve_fk(const Eigen::MatrixXd& f, const Eigen::VectorXd& y,
                         const SolverOptions& opts, SolveDiagnostics& diag) {
  if (!f.allFinite() || !y.allFinite())
    raise(ErrorKind::Numeric, "FK=Y system contains non-finite entries");
  if (y.norm() == 0.0) raise(ErrorKind::Calibration, "zero MDE: Y vanishes, no direction to solve");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv(0);
  double smin = sv(sv.size() - 1);
  diag.cond_f = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  diag.ridge_lambda_used = 0.0;

  auto svd_solution = [&]() {
    Eigen::VectorXd inv = sv;
    for (Eigen::Index i = 0; i < inv.size(); ++i)
      inv(i) = sv(i) > opts.svd_cutoff ? 1.0 / sv(i) : 0.0;
    diag.solver_level = SolverLevel::Svd;
    return Eigen::VectorXd(svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * y);
  };

  if (diag.cond_f < opts.cond_gate_direct) {
    Eigen::VectorXd k = f.partialPivLu().solve(y);
    if (k.allFinite() && (f * k - y).norm() <= 1e-6 * y.norm()) {
      diag.solver_level = SolverLevel::Direct;
      return k;
    }
    return svd_solution();
  }
  if (diag.cond_f < opts.cond_gate_ridge) {
    Eigen::MatrixXd freg =
        f + opts.ridge_lambda * Eigen::MatrixXd::Identity(f.rows(), f.cols());
    Eigen::VectorXd k = freg.partialPivLu().solve(y);
    if (k.allFinite() && (freg * k - y).norm() <= 1e-6 * y.norm()) {
      diag.solver_level = SolverLevel::Ridge;
      diag.ridge_lambda_used = opts.ridge_lambda;
      return k;
    }
    return svd_solution();
  }
  return svd_solution();
}

double offset_k0(const Eigen::VectorXd& k, const Eigen::VectorXd& u, const Eigen::VectorXd& m) {
  if (k.size() != u.size() || k.size() != m.size())
    raise(ErrorKind::InvalidArgument, "offset_k0 dimension mismatch");
  return -0.5 * k.dot(m + u);
}

LlrStats llr_stats(const Eigen::VectorXd& k, double k0, const H0Moments& h0, const H1Spec& h1) {
  LlrStats st;
  Eigen::VectorXd y = h1.m - h0.u;
  st.e0 = k0 + k.dot(h0.u);
  st.var0 = k.dot(h0.cov0 * k);
  st.j_s = k.dot(y);
  if (!(st.var0 > 0.0))
    raise(ErrorKind::Degenerate, "Var[Lambda|H0] is not positive; statistic is degenerate");
  st.eta = st.j_s / std::sqrt(st.var0);
  return st;
}

Eigen::MatrixXd orthonormalize(const H0Moments& h0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h0.cov0);
  if (eig.info() != Eigen::Success) raise(ErrorKind::Numeric, "eigendecomposition failed");
  Eigen::VectorXd lam = eig.eigenvalues();
  constexpr double kRidge = 1e-10;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -1e-10)
      raise(ErrorKind::Numeric, "cov0 has a significantly negative eigenvalue");
    if (lam(i) < kRidge) lam(i) += kRidge;
  }
  Eigen::VectorXd scale = lam.array().sqrt().inverse();
  return eig.eigenvectors() * scale.asDiagonal() * eig.eigenvectors().transpose();
}

namespace {

CalibratedModel assemble(const BasisSpec& basis, const H0Moments& h0, const H1Spec& h1,
                         const SolverOptions& opts) {
  Eigen::MatrixXd f;
  Eigen::VectorXd y;
  build_system(h0, h1, f, y);
  SolveDiagnostics diag;
  Eigen::VectorXd k = solve_fk(f, y, opts, diag);
  double k0 = offset_k0(k, h0.u, h1.m);
  LlrStats st = llr_stats(k, k0, h0, h1);
  diag.j_s = st.j_s;
  diag.eta = st.eta;

  CalibratedModel model;
  model.basis = basis;
  model.k.assign(k.data(), k.data() + k.size());
  model.k0 = k0;
  model.e0 = st.e0;
  model.var0 = st.var0;
  model.winsor_lo = h0.winsor_lo;
  model.winsor_hi = h0.winsor_hi;
  model.diagnostics = diag;
  return model;
}

}  // namespace

CalibratedModel calibrate(std::span<const double> xs, const BasisSpec& basis, const MdeSpec& mde,
                          const CalibrationOptions& opts, Rng* rng) {
  std::vector<double> winsorized;
  H0Moments h0 = estimate_h0(xs, basis, opts.winsor_alpha, &winsorized);
  H1Spec h1 = specify_h1_mde(h0, basis, mde, winsorized, rng);
  return assemble(basis, h0, h1, opts.solver);
}

CalibratedModel calibrate_exact(const BasisSpec& basis, const Eigen::VectorXd& u,
                                const Eigen::MatrixXd& cov0, const Eigen::VectorXd& m,
                                const Eigen::MatrixXd& cov1, const SolverOptions& opts) {
  basis.validate();
  if (u.size() != basis.order || m.size() != basis.order || cov0.rows() != basis.order ||
      cov1.rows() != basis.order || cov0.cols() != basis.order || cov1.cols() != basis.order)
    raise(ErrorKind::InvalidArgument, "exact moments must match the basis order");
  H0Moments h0;
  h0.u = u;
  h0.cov0 = cov0;
  h0.n_cal = 0;
  H1Spec h1;
  h1.m = m;
  h1.cov1 = cov1;
  return assemble(basis, h0, h1, opts);
}

OrderSelection select_order(std::span<const double> xs, BasisFamily family, int s_max,
                            double rel_gain, const MdeSpec& mde, const CalibrationOptions& opts,
                            Rng* rng) {
  if (s_max < 1 || s_max > kMaxOrder)
    raise(ErrorKind::InvalidArgument, "order cap must lie in [1, 6]");
  OrderSelection sel;
  sel.j_values.reserve(static_cast<std::size_t>(s_max));
  for (int s = 1; s <= s_max; ++s) {
    BasisSpec basis = BasisSpec::make(family, s);
    // Swap-mode reference draws must replay identically at every order.
    Rng local = rng ? *rng : Rng(0);
    CalibratedModel model = calibrate(xs, basis, mde, opts, rng ? &local : nullptr);
    sel.j_values.push_back(model.diagnostics.j_s);
  }
  sel.chosen = s_max;
  for (int s = 1; s < s_max; ++s) {
    double prev = sel.j_values[static_cast<std::size_t>(s - 1)];
    double next = sel.j_values[static_cast<std::size_t>(s)];
    if (prev > 0.0 && (next - prev) / prev < rel_gain) {
      sel.chosen = s;
      break;
    }
  }
  return sel;
}

const char* to_string(SolverLevel level) {
  switch (level) {
    case SolverLevel::Direct: return "direct";
    case SolverLevel::Ridge: return "ridge";
    case SolverLevel::Svd: return "svd";
  }
  return "?";
}

const char* to_string(ThresholdKind kind) {
  switch (kind) {
    case ThresholdKind::Pe: return "pe";
    case ThresholdKind::Vp: return "vp";
    case ThresholdKind::Cantelli: return "cantelli";
    case ThresholdKind::Simulation: return "simulation";
    case ThresholdKind::Arl0Bisect: return "arl0";
  }
  return "?";
}

const char* to_string(RuleKind rule) {
  switch (rule) {
    case RuleKind::Cusum: return "cusum";
    case RuleKind::Grsh: return "grsh";
    case RuleKind::Srp: return "srp";
  }
  return "?";
}

const char* to_string(BasisFamily family) {
  switch (family) {
    case BasisFamily::Poly: return "poly";
    case BasisFamily::Log: return "log";
    case BasisFamily::Frac: return "frac";
    case BasisFamily::Hermite: return "hermite";
  }
  return "?";
}

}  // namespace gsa
