#include "smrpm/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace smrpm {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
}

}  // namespace

int FunctionalDataset::max_points() const {
  int best = 0;
  for (const auto& curve : curves) {
    best = std::max(best, static_cast<int>(curve.x.size()));
  }
  return best;
}

double FunctionalDataset::x_min() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& curve : curves) {
    for (double v : curve.x) lo = std::min(lo, v);
  }
  return lo;
}

double FunctionalDataset::x_max() const {
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& curve : curves) {
    for (double v : curve.x) hi = std::max(hi, v);
  }
  return hi;
}

void FunctionalDataset::validate() const {
  if (curves.empty()) throw std::invalid_argument("FunctionalDataset: no curves");
  for (const auto& curve : curves) {
    if (curve.x.empty() || curve.x.size() != curve.y.size()) {
      throw std::invalid_argument("FunctionalDataset: curve '" + curve.id +
                                  "' has mismatched or empty points");
    }
    if (!std::is_sorted(curve.x.begin(), curve.x.end())) {
      throw std::invalid_argument("FunctionalDataset: curve '" + curve.id +
                                  "' has unsorted evaluation points");
    }
  }
}

FunctionalContext::FunctionalContext(const FunctionalDataset& data,
                                     const BasisSpec& basis)
    : data_(&data), basis_(&basis) {
  data.validate();
  const int K = basis.num_basis();
  designs_.reserve(data.n());
  supports_.reserve(data.n());
  for (const auto& curve : data.curves) {
    Eigen::MatrixXd design = design_matrix(basis, curve.x);
    std::vector<std::pair<int, int>> supp(K, {0, 0});
    for (int k = 0; k < K; ++k) {
      int first = -1, last = -1;
      for (int m = 0; m < design.rows(); ++m) {
        if (design(m, k) != 0.0) {
          if (first < 0) first = m;
          last = m;
        }
      }
      supp[k] = (first < 0) ? std::make_pair(0, 0)
                            : std::make_pair(first, last + 1);
    }
    designs_.push_back(std::move(design));
    supports_.push_back(std::move(supp));
  }
}

double fn_fitted_value(const FunctionalContext& ctx, const ClusterMatrix& clusters,
                       const FunctionalState& state, int i, int m) {
  const Eigen::MatrixXd& design = ctx.design(i);
  double fit = 0.0;
  for (int k = 0; k < ctx.num_basis(); ++k) {
    const double b = design(m, k);
    if (b != 0.0) fit += b * state.theta_star[k][clusters.label(i, k)];
  }
  return fit;
}

double fn_loglik_curve_at_label(int i, int k, int j, const FunctionalContext& ctx,
                                const ClusterMatrix& clusters,
                                const FunctionalState& state,
                                const double* aux_theta) {
  const int num_clusters = clusters.column(k).num_clusters();
  double theta_k;
  if (j < num_clusters) {
    if (j < 0) throw std::invalid_argument("fn_loglik_curve_at_label: bad label");
    theta_k = state.theta_star[k][j];
  } else if (j == num_clusters) {
    if (aux_theta == nullptr) {
      throw std::invalid_argument(
          "fn_loglik_curve_at_label: auxiliary coefficient required for a new cluster");
    }
    theta_k = *aux_theta;
  } else {
    throw std::invalid_argument("fn_loglik_curve_at_label: label beyond J_k + 1");
  }

  const Eigen::MatrixXd& design = ctx.design(i);
  double loglik = 0.0;
  for (int m = 0; m < ctx.num_points(i); ++m) {
    double fit = 0.0;
    for (int kk = 0; kk < ctx.num_basis(); ++kk) {
      const double b = design(m, kk);
      if (b == 0.0) continue;
      fit += b * (kk == k ? theta_k : state.theta_star[kk][clusters.label(i, kk)]);
    }
    loglik += log_normal_pdf(ctx.y(i, m), fit, state.sigma2);
  }
  return loglik;
}

std::vector<std::vector<int>> backward_sets(const LabelVector& prev,
                                            const LabelVector& curr) {
  std::vector<std::vector<int>> sets(curr.num_clusters());
  for (std::size_t i = 0; i < curr.size(); ++i) {
    auto& parents = sets[curr.label(static_cast<int>(i))];
    const int from = prev.label(static_cast<int>(i));
    if (std::find(parents.begin(), parents.end(), from) == parents.end()) {
      parents.push_back(from);
    }
  }
  for (auto& parents : sets) std::sort(parents.begin(), parents.end());
  return sets;
}

std::vector<std::vector<int>> forward_sets(const LabelVector& curr,
                                           const LabelVector& next) {
  std::vector<std::vector<int>> sets(curr.num_clusters());
  for (std::size_t i = 0; i < curr.size(); ++i) {
    auto& heirs = sets[curr.label(static_cast<int>(i))];
    const int to = next.label(static_cast<int>(i));
    if (std::find(heirs.begin(), heirs.end(), to) == heirs.end()) {
      heirs.push_back(to);
    }
  }
  for (auto& heirs : sets) std::sort(heirs.begin(), heirs.end());
  return sets;
}

double parent_mean(const std::vector<int>& parents,
                   const std::vector<double>& theta_prev) {
  if (parents.empty()) throw std::invalid_argument("parent_mean: empty parent set");
  double sum = 0.0;
  for (int l : parents) sum += theta_prev[l];
  return sum / static_cast<double>(parents.size());
}

double fn_update_theta_star(int k, int j, const FunctionalContext& ctx,
                            const ClusterMatrix& clusters, FunctionalState& state,
                            Rng& rng) {
  const int K = clusters.K();
  const LabelVector& col = clusters.column(k);
  if (j < 0 || j >= col.num_clusters()) {
    throw std::invalid_argument("fn_update_theta_star: empty or missing cluster");
  }
  const double tau_prec = 1.0 / state.tau2;
  const double sig_prec = 1.0 / state.sigma2;
  const double phi = state.phi;

  double prec = tau_prec;
  double weighted = 0.0;
  if (k > 0) {
    const auto parents = backward_sets(clusters.column(k - 1), col);
    weighted += tau_prec * phi * parent_mean(parents[j], state.theta_star[k - 1]);
  }
  if (k + 1 < K) {
    const LabelVector& next = clusters.column(k + 1);
    const auto heirs = forward_sets(col, next);
    const auto parents_next = backward_sets(col, next);
    for (int jn : heirs[j]) {
      const auto& from = parents_next[jn];
      const double coef = phi / static_cast<double>(from.size());
      prec += tau_prec * coef * coef;
      double rest = 0.0;
      for (int l : from) {
        if (l != j) rest += state.theta_star[k][l];
      }
      const double eps = state.theta_star[k + 1][jn] -
                         phi * rest / static_cast<double>(from.size());
      weighted += tau_prec * coef * eps;
    }
  }
  for (int i = 0; i < ctx.n(); ++i) {
    if (clusters.label(i, k) != j) continue;
    const Eigen::MatrixXd& design = ctx.design(i);
    const auto [first, last] = ctx.support(i, k);
    for (int m = first; m < last; ++m) {
      const double b = design(m, k);
      // partial residual: data minus every other basis contribution
      const double partial = ctx.y(i, m) -
                             (fn_fitted_value(ctx, clusters, state, i, m) -
                              b * state.theta_star[k][j]);
      prec += sig_prec * b * b;
      weighted += sig_prec * b * partial;
    }
  }
  const double var = 1.0 / prec;
  const double draw = rng.normal(weighted * var, std::sqrt(var));
  state.theta_star[k][j] = draw;
  return draw;
}

double fn_update_sigma2(const FunctionalContext& ctx, const ClusterMatrix& clusters,
                        FunctionalState& state, Rng& rng) {
  double shape = state.hyper.a_sigma;
  double rate = state.hyper.b_sigma;
  for (int i = 0; i < ctx.n(); ++i) {
    shape += 0.5 * ctx.num_points(i);
    for (int m = 0; m < ctx.num_points(i); ++m) {
      const double r = ctx.y(i, m) - fn_fitted_value(ctx, clusters, state, i, m);
      rate += 0.5 * r * r;
    }
  }
  state.sigma2 = rng.inv_gamma(shape, rate);
  return state.sigma2;
}

double fn_update_tau2(const ClusterMatrix& clusters, FunctionalState& state,
                      Rng& rng) {
  double shape = state.hyper.a_tau;
  double rate = state.hyper.b_tau;
  for (int k = 0; k < clusters.K(); ++k) {
    const LabelVector& col = clusters.column(k);
    shape += 0.5 * col.num_clusters();
    if (k == 0) {
      for (double theta : state.theta_star[0]) rate += 0.5 * theta * theta;
      continue;
    }
    const auto parents = backward_sets(clusters.column(k - 1), col);
    for (int j = 0; j < col.num_clusters(); ++j) {
      const double dev = state.theta_star[k][j] -
                         state.phi * parent_mean(parents[j], state.theta_star[k - 1]);
      rate += 0.5 * dev * dev;
    }
  }
  state.tau2 = rng.inv_gamma(shape, rate);
  return state.tau2;
}

double fn_update_phi(const ClusterMatrix& clusters, FunctionalState& state,
                     Rng& rng) {
  const double tau_prec = 1.0 / state.tau2;
  double prec = 1.0 / state.hyper.s0_2;
  double weighted = state.hyper.m0 / state.hyper.s0_2;
  for (int k = 1; k < clusters.K(); ++k) {
    const LabelVector& col = clusters.column(k);
    const auto parents = backward_sets(clusters.column(k - 1), col);
    for (int j = 0; j < col.num_clusters(); ++j) {
      const double pm = parent_mean(parents[j], state.theta_star[k - 1]);
      prec += tau_prec * pm * pm;
      weighted += tau_prec * state.theta_star[k][j] * pm;
    }
  }
  const double var = 1.0 / prec;
  state.phi = rng.normal(weighted * var, std::sqrt(var));
  return state.phi;
}

double fn_data_loglik(const FunctionalContext& ctx, const ClusterMatrix& clusters,
                      const FunctionalState& state) {
  double loglik = 0.0;
  for (int i = 0; i < ctx.n(); ++i) {
    for (int m = 0; m < ctx.num_points(i); ++m) {
      loglik += log_normal_pdf(ctx.y(i, m),
                               fn_fitted_value(ctx, clusters, state, i, m),
                               state.sigma2);
    }
  }
  return loglik;
}

double ts_loglik(double y, double mu, double sigma2) {
  return log_normal_pdf(y, mu, sigma2);
}

void ts_update_params(const TimeSeriesDataset& data, const ClusterMatrix& clusters,
                      TimeSeriesState& state, Rng& rng) {
  const int K = data.K();
  const int n = data.n();
  const TimeSeriesHyper& hyper = state.hyper;

  // phi0
  {
    double sum_theta = 0.0;
    for (double t : state.theta) sum_theta += t;
    const double var = 1.0 / (1.0 / hyper.s0_2 + K / state.lambda2);
    const double mean = var * (hyper.m0 / hyper.s0_2 + sum_theta / state.lambda2);
    state.phi0 = rng.normal(mean, std::sqrt(var));
  }
  // lambda2
  {
    double rate = hyper.b_lambda;
    for (double t : state.theta) {
      const double d = t - state.phi0;
      rate += 0.5 * d * d;
    }
    state.lambda2 = rng.inv_gamma(hyper.a_lambda + 0.5 * K, rate);
  }
  // theta_k and tau2_k
  for (int k = 0; k < K; ++k) {
    const int J = clusters.column(k).num_clusters();
    double sum_mu = 0.0;
    for (double m : state.mu_star[k]) sum_mu += m;
    const double var = 1.0 / (1.0 / state.lambda2 + J / state.tau2[k]);
    const double mean =
        var * (state.phi0 / state.lambda2 + sum_mu / state.tau2[k]);
    state.theta[k] = rng.normal(mean, std::sqrt(var));

    double rate = hyper.b_tau;
    for (double m : state.mu_star[k]) {
      const double d = m - state.theta[k];
      rate += 0.5 * d * d;
    }
    state.tau2[k] = rng.inv_gamma(hyper.a_tau + 0.5 * J, rate);
  }
  // mu*_kj and sigma2*_kj
  for (int k = 0; k < K; ++k) {
    const LabelVector& col = clusters.column(k);
    const std::vector<int> sizes = col.cluster_sizes();
    for (int j = 0; j < col.num_clusters(); ++j) {
      double sum_y = 0.0;
      for (int i = 0; i < n; ++i) {
        if (col.label(i) == j) sum_y += data.y(i, k);
      }
      const double var =
          1.0 / (1.0 / state.tau2[k] + sizes[j] / state.sigma2_star[k][j]);
      const double mean = var * (state.theta[k] / state.tau2[k] +
                                 sum_y / state.sigma2_star[k][j]);
      state.mu_star[k][j] = rng.normal(mean, std::sqrt(var));

      double rate = hyper.b_sigma;
      for (int i = 0; i < n; ++i) {
        if (col.label(i) != j) continue;
        const double d = data.y(i, k) - state.mu_star[k][j];
        rate += 0.5 * d * d;
      }
      state.sigma2_star[k][j] =
          rng.inv_gamma(hyper.a_sigma + 0.5 * sizes[j], rate);
    }
  }
}

double ts_data_loglik(const TimeSeriesDataset& data, const ClusterMatrix& clusters,
                      const TimeSeriesState& state) {
  double loglik = 0.0;
  for (int k = 0; k < data.K(); ++k) {
    for (int i = 0; i < data.n(); ++i) {
      const int j = clusters.label(i, k);
      loglik += ts_loglik(data.y(i, k), state.mu_star[k][j], state.sigma2_star[k][j]);
    }
  }
  return loglik;
}

}  // namespace smrpm
