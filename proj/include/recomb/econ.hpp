#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace recomb::econ {

struct AbsorbDiagnostics {
  int sweeps = 0;
  double last_delta = 0.0;
  bool converged = false;
};

// Alternating within-group demeaning of every design column across all label
// dimensions until the largest subtracted group mean falls below tol.
// Labels in groups[d] are dense ids in [0, G_d). Throws on non-convergence.
Eigen::MatrixXd absorb_fixed_effects(
    const Eigen::MatrixXd& design,
    const std::vector<std::vector<std::int32_t>>& groups, double tol = 1e-10,
    int max_sweeps = 10000, AbsorbDiagnostics* diagnostics = nullptr,
    int threads = 1);

struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
};

// Least squares via column-pivoted QR. Rank deficiency throws, naming a
// dependent column; requires rows > cols.
OlsFit fit_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X);

// Cluster-robust sandwich covariance with small-sample factor
// (G/(G-1)) * ((N-1)/(N-K)), where K = X cols + absorbed_df.
Eigen::MatrixXd clustered_covariance(const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& residuals,
                                     const std::vector<std::int32_t>& clusters,
                                     int absorbed_df = 0);

struct RegressionRow {
  double outcome = 0.0;
  double s = 0.0;
  double mean_knowledge = 0.0;  // Kbar control
  double pair_count = 0.0;      // M control
  std::string firm;
  std::string ipc_class;  // effect dimension and cluster dimension
  int year = 0;
};

struct RegressionSpec {
  int max_order = 8;    // selection searches orders 1..max_order
  int fixed_order = 0;  // > 0 skips selection and fits exactly this order
  int firm_threshold = 500;  // firms at/above get own effect, rest pooled
  double absorb_tol = 1e-10;
  int absorb_max_sweeps = 10000;
  int threads = 1;
};

struct FitResult {
  int order = 0;
  Eigen::VectorXd beta;        // s^1..s^order, then Kbar, M
  Eigen::MatrixXd covariance;  // clustered, conformable with beta
  std::vector<double> bic;     // bic[k] is polynomial order k+1
  double rss = 0.0;
  std::int64_t n = 0;
  int k = 0;  // regressor count plus absorbed_df
  int absorbed_df = 0;
  double outcome_mean = 0.0;
  std::vector<double> power_means;    // mean of s^j for j = 1..order
  std::vector<double> control_means;  // Kbar, M
  int cluster_count = 0;
  std::vector<int> group_counts;  // firm (thresholded), ipc, year
  AbsorbDiagnostics absorb;
  Eigen::VectorXd residuals;
};

// Absorbs firm/ipc/year effects, selects the polynomial order by BIC
// (ties broken toward the smaller order), and reports the chosen fit with
// covariance clustered on ipc classes.
FitResult fit_regression(const std::vector<RegressionRow>& rows,
                         const RegressionSpec& spec);

struct CurvePoint {
  double s = 0.0;
  double fit = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
};

// Polynomial curve with controls and absorbed effects held at sample means;
// the 95% band is the delta method on the polynomial contrast vector.
// Grid values must lie in (0, 0.5].
std::vector<CurvePoint> conditional_expectation_curve(
    const FitResult& fit, const std::vector<double>& grid);

double pinball_loss(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                    const Eigen::VectorXd& beta, double tau);

struct QuantileFit {
  double tau = 0.0;
  Eigen::VectorXd beta;
  double loss = 0.0;
  bool degenerate = false;  // outcome mass at its minimum >= tau
  int stages = 0;           // smoothing stages consumed
  bool converged = false;
};

// Pinball-loss fit: least-squares start, reweighted least squares with the
// smoothing epsilon annealed toward zero, then exact coordinate descent so
// that no single-coefficient perturbation improves the loss.
QuantileFit fit_quantile(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                         double tau);

struct DummyDesign {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;  // [1 | s..s^m | Kbar M | firm, ipc, year indicators]
  int order = 0;
  int control_count = 2;
  std::vector<double> power_means;
  std::vector<double> control_means;
  std::vector<double> dummy_means;  // one per indicator column
};

// Explicit-indicator design for quantile fits; one level per dimension is
// dropped against the intercept. Firms below the threshold share a level.
DummyDesign build_dummy_design(const std::vector<RegressionRow>& rows,
                               int order, int firm_threshold);

// Fitted value at s with controls and indicator shares at sample means.
double evaluate_at_means(const DummyDesign& design, const Eigen::VectorXd& beta,
                         double s);

// One quantile fit per tau over a shared design; taus run independently.
std::vector<QuantileFit> fit_quantile_set(const DummyDesign& design,
                                          const std::vector<double>& taus,
                                          int threads = 1);

}  // namespace recomb::econ
