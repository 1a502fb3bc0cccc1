#include "recomb/econ.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "recomb/errors.hpp"

namespace recomb::econ {

Eigen::MatrixXd absorb_fixed_effects(
    const Eigen::MatrixXd& design,
    const std::vector<std::vector<std::int32_t>>& groups, double tol,
    int max_sweeps, AbsorbDiagnostics* diagnostics, int threads) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (tol <= 0.0) throw ComputeError("absorption tolerance must be positive");
  for (const auto& g : groups)
    if (static_cast<Eigen::Index>(g.size()) != n)
      throw ComputeError("group label vector length differs from row count");

  std::vector<std::int32_t> group_counts;
  for (const auto& g : groups) {
    std::int32_t mx = -1;
    for (std::int32_t v : g) {
      if (v < 0) throw ComputeError("group labels must be non-negative");
      mx = std::max(mx, v);
    }
    group_counts.push_back(mx + 1);
  }

  Eigen::MatrixXd m = design;
  AbsorbDiagnostics diag;
  for (diag.sweeps = 1; diag.sweeps <= max_sweeps; ++diag.sweeps) {
    double delta = 0.0;
#pragma omp parallel for schedule(static) reduction(max : delta) \
    num_threads(threads) if (threads > 1)
    for (Eigen::Index c = 0; c < p; ++c) {
      std::vector<double> sum;
      std::vector<std::int64_t> cnt;
      for (std::size_t d = 0; d < groups.size(); ++d) {
        const auto& label = groups[d];
        sum.assign(group_counts[d], 0.0);
        cnt.assign(group_counts[d], 0);
        for (Eigen::Index i = 0; i < n; ++i) {
          sum[label[i]] += m(i, c);
          ++cnt[label[i]];
        }
        for (std::int32_t g = 0; g < group_counts[d]; ++g)
          if (cnt[g]) {
            sum[g] /= static_cast<double>(cnt[g]);
            delta = std::max(delta, std::abs(sum[g]));
          }
        for (Eigen::Index i = 0; i < n; ++i) m(i, c) -= sum[label[i]];
      }
    }
    diag.last_delta = delta;
    if (delta < tol) {
      diag.converged = true;
      break;
    }
  }
  if (diagnostics) *diagnostics = diag;
  if (!diag.converged) {
    std::ostringstream msg;
    msg << "fixed-effect absorption did not converge after " << max_sweeps
        << " sweeps (last delta " << diag.last_delta << ")";
    throw ComputeError(msg.str());
  }
  return m;
}

OlsFit fit_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
  if (X.rows() != y.size())
    throw ComputeError("outcome and design row counts differ");
  if (X.rows() <= X.cols())
    throw ComputeError("least squares needs more rows than columns");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) {
    const auto& perm = qr.colsPermutation().indices();
    Eigen::Index bad = X.cols();
    for (Eigen::Index i = qr.rank(); i < X.cols(); ++i)
      bad = std::min<Eigen::Index>(bad, perm[i]);
    throw ComputeError("design is rank deficient: column " +
                       std::to_string(bad) + " is collinear");
  }
  OlsFit fit;
  fit.beta = qr.solve(y);
  fit.residuals = y - X * fit.beta;
  return fit;
}

Eigen::MatrixXd clustered_covariance(const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& residuals,
                                     const std::vector<std::int32_t>& clusters,
                                     int absorbed_df) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (static_cast<Eigen::Index>(clusters.size()) != n)
    throw ComputeError("cluster label length differs from row count");

  // Cluster score sums, in first-seen label order.
  std::unordered_map<std::int32_t, Eigen::Index> slot;
  std::vector<Eigen::VectorXd> scores;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [it, inserted] = slot.try_emplace(clusters[i], scores.size());
    if (inserted) scores.emplace_back(Eigen::VectorXd::Zero(p));
    scores[it->second] += X.row(i).transpose() * residuals[i];
  }
  const auto g = static_cast<double>(scores.size());
  if (scores.size() < 2)
    throw ComputeError("clustered covariance needs at least 2 clusters");

  const double k = static_cast<double>(p + absorbed_df);
  const auto nn = static_cast<double>(n);
  if (nn <= k)
    throw ComputeError("too few rows for the small-sample correction");

  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
  for (const auto& s : scores) meat += s * s.transpose();

  Eigen::LDLT<Eigen::MatrixXd> bread((X.transpose() * X).eval());
  Eigen::MatrixXd v = bread.solve(meat);
  v = bread.solve(v.transpose()).transpose();
  v *= (g / (g - 1.0)) * ((nn - 1.0) / (nn - k));
  return ((v + v.transpose()) / 2.0).eval();
}

namespace {

struct EffectLabels {
  std::vector<std::vector<std::int32_t>> dims;  // firm, ipc, year
  std::vector<int> group_counts;
};

// Dense labels in first-seen row order; firms below the threshold share one
// pooled level.
EffectLabels build_labels(const std::vector<RegressionRow>& rows,
                          int firm_threshold) {
  std::unordered_map<std::string, std::int64_t> firm_patents;
  for (const auto& r : rows) ++firm_patents[r.firm];

  EffectLabels out;
  out.dims.assign(3, {});
  for (auto& d : out.dims) d.reserve(rows.size());

  std::unordered_map<std::string, std::int32_t> firm_id, ipc_id;
  std::unordered_map<int, std::int32_t> year_id;
  const std::string pooled = "\x01pooled";
  for (const auto& r : rows) {
    const std::string& firm_key =
        firm_patents[r.firm] >= firm_threshold ? r.firm : pooled;
    out.dims[0].push_back(
        firm_id.try_emplace(firm_key, static_cast<std::int32_t>(firm_id.size()))
            .first->second);
    out.dims[1].push_back(
        ipc_id.try_emplace(r.ipc_class, static_cast<std::int32_t>(ipc_id.size()))
            .first->second);
    out.dims[2].push_back(
        year_id.try_emplace(r.year, static_cast<std::int32_t>(year_id.size()))
            .first->second);
  }
  out.group_counts = {static_cast<int>(firm_id.size()),
                      static_cast<int>(ipc_id.size()),
                      static_cast<int>(year_id.size())};
  return out;
}

Eigen::MatrixXd power_columns(const std::vector<RegressionRow>& rows,
                              int order) {
  Eigen::MatrixXd p(rows.size(), order);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    double v = 1.0;
    for (int k = 0; k < order; ++k) {
      v *= rows[i].s;
      p(i, k) = v;
    }
  }
  return p;
}

}  // namespace

FitResult fit_regression(const std::vector<RegressionRow>& rows,
                         const RegressionSpec& spec) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw ComputeError("regression sample is empty");
  const int max_order = spec.fixed_order > 0 ? spec.fixed_order : spec.max_order;
  if (max_order < 1 || max_order > 8)
    throw ComputeError("polynomial order must lie in [1, 8]");
  const int first_order = spec.fixed_order > 0 ? spec.fixed_order : 1;

  EffectLabels labels = build_labels(rows, spec.firm_threshold);
  int absorbed_df = 1;
  for (int gc : labels.group_counts) absorbed_df += gc - 1;

  // One absorption over the largest design; per-order fits take column
  // subsets (demeaning is per-column, so the subsets are exact).
  Eigen::MatrixXd design(n, 1 + max_order + 2);
  for (Eigen::Index i = 0; i < n; ++i) design(i, 0) = rows[i].outcome;
  design.middleCols(1, max_order) = power_columns(rows, max_order);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 1 + max_order) = rows[i].mean_knowledge;
    design(i, 2 + max_order) = rows[i].pair_count;
  }

  AbsorbDiagnostics diag;
  Eigen::MatrixXd demeaned =
      absorb_fixed_effects(design, labels.dims, spec.absorb_tol,
                           spec.absorb_max_sweeps, &diag, spec.threads);
  Eigen::VectorXd y = demeaned.col(0);

  const int orders = max_order - first_order + 1;
  std::vector<OlsFit> fits(orders);
  std::vector<double> rss(orders), bic(orders);
  std::vector<std::string> errors(orders);
#pragma omp parallel for schedule(dynamic, 1) num_threads(spec.threads) \
    if (spec.threads > 1 && orders > 1)
  for (int k = 0; k < orders; ++k) {
    const int m = first_order + k;
    Eigen::MatrixXd x(n, m + 2);
    x.leftCols(m) = demeaned.middleCols(1, m);
    x.rightCols(2) = demeaned.rightCols(2);
    try {
      fits[k] = fit_ols(y, x);
      rss[k] = fits[k].residuals.squaredNorm();
      const double kk = static_cast<double>(m + 2 + absorbed_df);
      const auto nn = static_cast<double>(n);
      bic[k] = nn * std::log(rss[k] / nn) + kk * std::log(nn);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw ComputeError(e);

  int chosen = 0;
  for (int k = 1; k < orders; ++k)
    if (bic[k] < bic[chosen]) chosen = k;

  FitResult out;
  out.order = first_order + chosen;
  out.beta = fits[chosen].beta;
  out.residuals = fits[chosen].residuals;
  out.bic = bic;
  out.rss = rss[chosen];
  out.n = n;
  out.k = out.order + 2 + absorbed_df;
  out.absorbed_df = absorbed_df;
  out.absorb = diag;
  out.group_counts = labels.group_counts;

  Eigen::MatrixXd x(n, out.order + 2);
  x.leftCols(out.order) = demeaned.middleCols(1, out.order);
  x.rightCols(2) = demeaned.rightCols(2);
  out.covariance =
      clustered_covariance(x, out.residuals, labels.dims[1], absorbed_df);
  out.cluster_count = labels.group_counts[1];

  out.outcome_mean = design.col(0).mean();
  for (int k = 1; k <= out.order; ++k)
    out.power_means.push_back(design.col(k).mean());
  out.control_means = {design.col(1 + max_order).mean(),
                       design.col(2 + max_order).mean()};
  return out;
}

std::vector<CurvePoint> conditional_expectation_curve(
    const FitResult& fit, const std::vector<double>& grid) {
  std::vector<CurvePoint> out;
  out.reserve(grid.size());
  for (double s : grid) {
    if (!(s > 0.0) || s > 0.5)
      throw InputError("curve grid value outside (0, 0.5]");
    Eigen::VectorXd g = Eigen::VectorXd::Zero(fit.beta.size());
    double v = 1.0;
    for (int k = 0; k < fit.order; ++k) {
      v *= s;
      g[k] = v - fit.power_means[k];
    }
    CurvePoint pt;
    pt.s = s;
    pt.fit = fit.outcome_mean + g.dot(fit.beta);
    const double var = g.dot(fit.covariance * g);
    const double half = 1.96 * std::sqrt(std::max(var, 0.0));
    pt.lo95 = pt.fit - half;
    pt.hi95 = pt.fit + half;
    out.push_back(pt);
  }
  return out;
}

double pinball_loss(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                    const Eigen::VectorXd& beta, double tau) {
  Eigen::VectorXd r = y - X * beta;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    loss += r[i] > 0.0 ? tau * r[i] : (tau - 1.0) * r[i];
  return loss;
}

namespace {

// Exact minimizer along one coordinate of the piecewise-linear pinball loss.
// Returns the step; 0 when the current point is already optimal in j.
double coordinate_step(const Eigen::VectorXd& r, const Eigen::MatrixXd& X,
                       Eigen::Index j, double tau) {
  const Eigen::Index n = r.size();
  double d_right = 0.0, d_left = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = X(i, j);
    if (x == 0.0) continue;
    // Directional derivative of rho_tau(r_i - delta x) at delta = 0.
    const double sign_right = r[i] > 0.0 || (r[i] == 0.0 && x < 0.0) ? 1.0 : -1.0;
    const double sign_left = r[i] > 0.0 || (r[i] == 0.0 && x > 0.0) ? 1.0 : -1.0;
    d_right += -x * (sign_right > 0.0 ? tau : tau - 1.0);
    d_left += -x * (sign_left > 0.0 ? tau : tau - 1.0);
  }
  if (d_right >= 0.0 && d_left <= 0.0) return 0.0;

  std::vector<std::pair<double, double>> breaks;  // (residual root, |x|)
  breaks.reserve(n);
  if (d_right < 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = X(i, j);
      if (x == 0.0) continue;
      const double t = r[i] / x;
      if (t > 0.0) breaks.emplace_back(t, std::abs(x));
    }
    std::sort(breaks.begin(), breaks.end());
    double slope = d_right;
    for (const auto& [t, w] : breaks) {
      slope += w;
      if (slope >= 0.0) return t;
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = X(i, j);
      if (x == 0.0) continue;
      const double t = r[i] / x;
      if (t < 0.0) breaks.emplace_back(t, std::abs(x));
    }
    std::sort(breaks.begin(), breaks.end(), std::greater<>());
    double slope = d_left;
    for (const auto& [t, w] : breaks) {
      slope -= w;
      if (slope <= 0.0) return t;
    }
  }
  // The loss grows without bound in both tails, so a crossing always exists.
  return breaks.empty() ? 0.0 : breaks.back().first;
}

}  // namespace

QuantileFit fit_quantile(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                         double tau) {
  if (!(tau > 0.0 && tau < 1.0))
    throw ComputeError("quantile level must lie in (0, 1)");
  const Eigen::Index n = y.size();
  const Eigen::Index p = X.cols();

  QuantileFit out;
  out.tau = tau;

  const double y_min = y.minCoeff();
  Eigen::Index at_min = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (y[i] == y_min) ++at_min;
  out.degenerate = static_cast<double>(at_min) / static_cast<double>(n) >= tau;

  Eigen::VectorXd beta = fit_ols(y, X).beta;
  Eigen::VectorXd best = beta;
  double best_loss = pinball_loss(y, X, beta, tau);

  // Reweighted least squares on the smoothed loss, epsilon annealed.
  const double y_mean = y.mean();
  const double scale =
      std::max(std::sqrt((y.array() - y_mean).square().mean()), 1e-12);
  for (int stage = 2; stage <= 8; ++stage) {
    const double eps = scale * std::pow(10.0, -stage);
    ++out.stages;
    for (int iter = 0; iter < 50; ++iter) {
      Eigen::VectorXd r = y - X * beta;
      Eigen::VectorXd w(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double num = r[i] > 0.0 ? tau : 1.0 - tau;
        w[i] = std::sqrt(num / std::max(std::abs(r[i]), eps));
      }
      Eigen::MatrixXd xw = w.asDiagonal() * X;
      Eigen::VectorXd yw = w.asDiagonal() * y;
      Eigen::VectorXd next =
          xw.colPivHouseholderQr().solve(yw);
      const double delta = (next - beta).cwiseAbs().maxCoeff();
      beta = next;
      const double loss = pinball_loss(y, X, beta, tau);
      if (loss < best_loss) {
        best_loss = loss;
        best = beta;
      }
      if (delta < eps * 1e-4) break;
    }
  }

  // Exact polish: each accepted move strictly decreases the loss, and a
  // clean sweep certifies per-coordinate optimality.
  beta = best;
  Eigen::VectorXd r = y - X * beta;
  for (int sweep = 0; sweep < 500; ++sweep) {
    bool moved = false;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double step = coordinate_step(r, X, j, tau);
      if (step == 0.0) continue;
      beta[j] += step;
      r -= step * X.col(j);
      moved = true;
    }
    if (!moved) {
      out.converged = true;
      break;
    }
  }
  out.beta = beta;
  out.loss = pinball_loss(y, X, beta, tau);
  if (out.loss > best_loss) {  // numerically impossible, but never regress
    out.beta = best;
    out.loss = best_loss;
  }
  return out;
}

DummyDesign build_dummy_design(const std::vector<RegressionRow>& rows,
                               int order, int firm_threshold) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw ComputeError("regression sample is empty");
  if (order < 1 || order > 8)
    throw ComputeError("polynomial order must lie in [1, 8]");
  EffectLabels labels = build_labels(rows, firm_threshold);

  int dummy_cols = 0;
  for (int gc : labels.group_counts) dummy_cols += gc - 1;

  DummyDesign d;
  d.order = order;
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) d.y[i] = rows[i].outcome;
  d.X = Eigen::MatrixXd::Zero(n, 1 + order + 2 + dummy_cols);
  d.X.col(0).setOnes();
  d.X.middleCols(1, order) = power_columns(rows, order);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.X(i, 1 + order) = rows[i].mean_knowledge;
    d.X(i, 2 + order) = rows[i].pair_count;
  }
  Eigen::Index col = 3 + order;
  for (std::size_t dim = 0; dim < labels.dims.size(); ++dim) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::int32_t g = labels.dims[dim][i];
      if (g > 0) d.X(i, col + g - 1) = 1.0;  // level 0 folds into the intercept
    }
    col += labels.group_counts[dim] - 1;
  }

  for (int k = 1; k <= order; ++k) d.power_means.push_back(d.X.col(k).mean());
  d.control_means = {d.X.col(1 + order).mean(), d.X.col(2 + order).mean()};
  for (Eigen::Index c = 3 + order; c < d.X.cols(); ++c)
    d.dummy_means.push_back(d.X.col(c).mean());
  return d;
}

double evaluate_at_means(const DummyDesign& design,
                         const Eigen::VectorXd& beta, double s) {
  double fit = beta[0];
  double v = 1.0;
  for (int k = 0; k < design.order; ++k) {
    v *= s;
    fit += beta[1 + k] * v;
  }
  for (int c = 0; c < design.control_count; ++c)
    fit += beta[1 + design.order + c] * design.control_means[c];
  const Eigen::Index base = 1 + design.order + design.control_count;
  for (std::size_t j = 0; j < design.dummy_means.size(); ++j)
    fit += beta[base + static_cast<Eigen::Index>(j)] * design.dummy_means[j];
  return fit;
}

std::vector<QuantileFit> fit_quantile_set(const DummyDesign& design,
                                          const std::vector<double>& taus,
                                          int threads) {
  std::vector<QuantileFit> out(taus.size());
  std::vector<std::string> errors(taus.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) \
    if (threads > 1 && taus.size() > 1)
  for (std::size_t i = 0; i < taus.size(); ++i) {
    try {
      out[i] = fit_quantile(design.y, design.X, taus[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw ComputeError(e);
  return out;
}

}  // namespace recomb::econ
