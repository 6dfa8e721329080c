#include "smrpm/prior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace smrpm {

namespace {

constexpr double kPi = std::numbers::pi;

double log_sum_exp(double a, double b) {
  const double hi = std::max(a, b);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log Phi(x) with an asymptotic tail so very negative arguments stay finite.
double log_norm_cdf(double x) {
  if (x < -10.0) {
    return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * kPi);
  }
  return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

}  // namespace

GammaMatrix::GammaMatrix(int n, int K) : n_(n), K_(K) {
  if (n <= 0 || K <= 0) {
    throw std::invalid_argument("GammaMatrix: dimensions must be positive");
  }
  values_.assign(static_cast<std::size_t>(n) * K, 0);
}

void GammaMatrix::set(int i, int k, int value) {
  if (i < 0 || i >= n_ || k < 0 || k >= K_) {
    throw std::out_of_range("GammaMatrix::set: index out of range");
  }
  if (value != 0 && value != 1) {
    throw std::invalid_argument("GammaMatrix::set: entries are binary");
  }
  if (k == 0 && value != 0) {
    throw std::invalid_argument("GammaMatrix::set: column 0 is pinned to zero");
  }
  values_[static_cast<std::size_t>(k) * n_ + i] = static_cast<std::uint8_t>(value);
}

void SmrpmConfig::validate() const {
  if (d_rho < 1) throw std::invalid_argument("SmrpmConfig: d_rho must be >= 1");
  if (d_gamma < 0) throw std::invalid_argument("SmrpmConfig: d_gamma must be >= 0");
  if (!(crp_mass > 0.0)) throw std::invalid_argument("SmrpmConfig: M must be > 0");
  if (d_gamma == 0) {
    if (!(a_alpha > 0.0) || !(b_alpha > 0.0)) {
      throw std::invalid_argument("SmrpmConfig: beta hyperparameters must be > 0");
    }
  } else {
    Eigen::LLT<Eigen::Matrix2d> llt(alpha_prior_cov);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("SmrpmConfig: alpha prior covariance not PD");
    }
  }
}

namespace {

int window_max(const GammaMatrix& gamma, int i, int k_prime, int d_rho) {
  for (int q = k_prime; q > k_prime - d_rho; --q) {
    if (gamma.at(i, q) == 1) return 1;
  }
  return 0;
}

}  // namespace

std::vector<int> fixed_set(const GammaMatrix& gamma, int k, int d_rho) {
  if (k < 0 || k >= gamma.K()) throw std::out_of_range("fixed_set: bad index");
  std::vector<int> fixed;
  for (int i = 0; i < gamma.n(); ++i) {
    if (window_max(gamma, i, k, d_rho) == 1) fixed.push_back(i);
  }
  return fixed;
}

bool in_fixed_set(const GammaMatrix& gamma, int i, int k, int d_rho) {
  return window_max(gamma, i, k, d_rho) == 1;
}

FlipSets flip_sets(const GammaMatrix& gamma, int i, int k, int k_prime, int d_rho) {
  if (k < 1 || k >= gamma.K()) throw std::out_of_range("flip_sets: bad k");
  if (k_prime < k || k_prime > k + d_rho - 1 || k_prime >= gamma.K()) {
    throw std::invalid_argument(
        "flip_sets: k_prime outside the influence window of gamma_{ik}");
  }
  FlipSets out;
  // max over the window with position k masked out
  int max_rest = 0;
  for (int q = k_prime; q > k_prime - d_rho; --q) {
    if (q != k && gamma.at(i, q) == 1) {
      max_rest = 1;
      break;
    }
  }
  for (int j = 0; j < gamma.n(); ++j) {
    if (j == i) {
      out.plus.push_back(i);  // gamma_{ik} := 1 always freezes i here
      if (max_rest == 1) out.minus.push_back(i);
      continue;
    }
    if (window_max(gamma, j, k_prime, d_rho) == 1) {
      out.plus.push_back(j);
      out.minus.push_back(j);
    }
  }
  out.differ_by_i = (max_rest == 0);
  return out;
}

namespace {

// Probability that one extra unit carrying unit i's current label at column
// k' joins the partition reduced to `units`, per the EPPF predictive.
double predictive_prob_of_label(const LabelVector& column,
                                const std::vector<int>& units, int i,
                                const Eppf& eppf) {
  const LabelVector reduced = column.reduce(units);
  const std::vector<double> probs = eppf.predictive(reduced);
  const int target = column.label(i);
  for (std::size_t r = 0; r < units.size(); ++r) {
    if (column.label(units[r]) == target) return probs[reduced.label(static_cast<int>(r))];
  }
  return probs.back();  // label absent from the reduced partition: new cluster
}

// log pi_{ik}^{(+/-)} for the logistic branch: product over the columns in
// which gamma_{ik} enters a Bernoulli term, with gamma_{ik} overridden.
double log_pi_logistic(const GammaMatrix& gamma, const AlphaState& alpha,
                       int i, int k, int flip_value, int d_gamma) {
  double log_pi = 0.0;
  const int hi = std::min(gamma.K() - 1, k + d_gamma);
  for (int kk = k; kk <= hi; ++kk) {
    double lag_sum = 0.0;
    for (int q = 1; q <= d_gamma; ++q) {
      const int col = kk - q;
      const int value = (col == k) ? flip_value : gamma.at(i, col);
      lag_sum += value;
    }
    const double eta = alpha.alpha(0) + alpha.alpha(1) * lag_sum;
    const int g = (kk == k) ? flip_value : gamma.at(i, kk);
    // log Ber(g; logistic(eta)) = g*eta - log(1 + exp(eta))
    const double log_denom = eta > 0.0 ? eta + std::log1p(std::exp(-eta))
                                       : std::log1p(std::exp(eta));
    log_pi += g * eta - log_denom;
  }
  return log_pi;
}

}  // namespace

double gamma_full_conditional(int i, int k, const GammaMatrix& gamma,
                              const ClusterMatrix& clusters,
                              const AlphaState& alpha, const SmrpmConfig& cfg,
                              const Eppf& eppf) {
  if (k < 1 || k >= gamma.K()) {
    throw std::out_of_range("gamma_full_conditional: column 0 is never updated");
  }
  const int K = gamma.K();

  // Compatibility indicators under gamma_{ik} = 1 and the EPPF ratios
  // P(rho^{R+}) / P(rho^{R-}) over the influence window.
  double log_ratio = 0.0;
  const int hi = std::min(K - 1, k + cfg.d_rho - 1);
  for (int kp = k; kp <= hi; ++kp) {
    const FlipSets fs = flip_sets(gamma, i, k, kp, cfg.d_rho);
    if (!compatible(clusters.column(kp - 1), clusters.column(kp), fs.plus)) {
      return 0.0;
    }
    if (fs.differ_by_i) {
      log_ratio += std::log(
          predictive_prob_of_label(clusters.column(kp), fs.minus, i, eppf));
    }
  }

  double log_pi_plus, log_pi_minus;
  if (cfg.d_gamma == 0) {
    const double a = alpha.alpha_k[k];
    if (a >= 1.0) return 1.0;
    if (a <= 0.0) return 0.0;
    log_pi_plus = std::log(a);
    log_pi_minus = std::log1p(-a);
  } else {
    log_pi_plus = log_pi_logistic(gamma, alpha, i, k, 1, cfg.d_gamma);
    log_pi_minus = log_pi_logistic(gamma, alpha, i, k, 0, cfg.d_gamma);
  }
  const double log_denom =
      log_sum_exp(log_pi_plus, log_pi_minus + log_ratio);
  return std::exp(log_pi_plus - log_denom);
}

ClusterPriorWeights cluster_prior_weights(int i, int k,
                                          const ClusterMatrix& clusters,
                                          const GammaMatrix& gamma,
                                          const SmrpmConfig& cfg,
                                          const Eppf& eppf) {
  const int K = clusters.K();
  const int n = clusters.n();
  if (k < 0 || k >= K || i < 0 || i >= n) {
    throw std::out_of_range("cluster_prior_weights: bad index");
  }
  if (in_fixed_set(gamma, i, k, cfg.d_rho)) {
    throw std::invalid_argument(
        "cluster_prior_weights: unit is frozen at this index");
  }
  const LabelVector& col = clusters.column(k);
  std::vector<int> counts = col.cluster_sizes();
  --counts[col.label(i)];

  // Partition with unit i removed, plus a map from surviving original labels
  // to their canonical index in the reduced partition.
  std::vector<int> others;
  others.reserve(n - 1);
  for (int j = 0; j < n; ++j) {
    if (j != i) others.push_back(j);
  }
  const LabelVector without_i = col.reduce(others);
  std::vector<int> reduced_index(col.num_clusters(), -1);
  for (std::size_t r = 0; r < others.size(); ++r) {
    reduced_index[col.label(others[r])] = without_i.label(static_cast<int>(r));
  }
  const std::vector<double> predictive = eppf.predictive(without_i);

  ClusterPriorWeights out;
  for (int lab = 0; lab < col.num_clusters(); ++lab) {
    if (counts[lab] > 0) out.label.push_back(lab);
  }
  out.label.push_back(-1);  // new cluster

  const std::vector<int> fixed_curr = fixed_set(gamma, k, cfg.d_rho);
  const std::vector<int> fixed_next =
      (k + 1 < K) ? fixed_set(gamma, k + 1, cfg.d_rho) : std::vector<int>{};
  const int fresh_label = col.num_clusters();

  std::vector<int> hypo(col.labels());
  for (int lab : out.label) {
    hypo[i] = (lab >= 0) ? lab : fresh_label;
    const LabelVector cand = LabelVector::from_labels(hypo);
    bool ok = true;
    if (k > 0) ok = compatible(clusters.column(k - 1), cand, fixed_curr);
    if (ok && k + 1 < K) ok = compatible(cand, clusters.column(k + 1), fixed_next);
    out.feasible.push_back(ok);
    const double base =
        (lab >= 0) ? predictive[reduced_index[lab]] : predictive.back();
    out.weight.push_back(ok ? base : 0.0);
  }
  return out;
}

namespace {

// Pieces of the PG(1, z) sampler of Polson, Scott and Windle, in the
// alternating-series form of Windle's Algorithm 6.  The target is
// J*(1, z) truncated pointwise at t = 2/pi; PG(1, c) = J*(1, c/2) / 4.

double pg_coef(int q, double x, double t) {
  // a_q(x): series coefficients of the J*(1, 0) density.
  const double h = q + 0.5;
  if (x <= t) {
    return kPi * h * std::pow(2.0 / (kPi * x), 1.5) *
           std::exp(-2.0 * h * h / x);
  }
  return kPi * h * std::exp(-0.5 * x * kPi * kPi * h * h);
}

// Inverse Gaussian(mu, lambda = 1).
double inverse_gaussian(double mu, Rng& rng) {
  const double nu = rng.normal(0.0, 1.0);
  const double v = nu * nu;
  double out = mu + 0.5 * mu * (mu * v - std::sqrt(4.0 * mu * v + mu * mu * v * v));
  if (rng.uniform() > mu / (mu + out)) out = mu * mu / out;
  return out;
}

// Gamma(1/2, 1) truncated to (pi/2, infinity), via Chung's rejection step.
double truncated_gamma(Rng& rng) {
  const double c = kPi / 2.0;
  while (true) {
    const double x = 2.0 * rng.exponential(1.0) + c;
    if (rng.uniform() <= std::sqrt(c / x)) return x;
  }
}

// Inverse Gaussian(1/z, 1) truncated to (0, t).
double truncated_inverse_gaussian(double z, double t, Rng& rng) {
  const double mu = 1.0 / z;
  if (!(mu <= t)) {
    // Small-t regime: sample 1/X from a truncated gamma.
    while (true) {
      const double x = 1.0 / truncated_gamma(rng);
      if (std::log(rng.uniform()) < -0.5 * z * z * x) return x;
    }
  }
  double x = t + 1.0;
  while (x >= t) x = inverse_gaussian(mu, rng);
  return x;
}

double pg1_draw(double z, Rng& rng) {
  z = std::fabs(z) * 0.5;
  const double t = 2.0 / kPi;

  // Mixture weights of the exponential (x > t) and inverse-Gaussian (x < t)
  // proposal pieces.
  const double rate = z * z / 2.0 + kPi * kPi / 8.0;
  const double log_a = std::log(4.0) - std::log(kPi) - z;
  const double w = std::sqrt(kPi / 2.0);
  const double log_f1 =
      log_a + log_norm_cdf(w * (t * z - 1.0)) + std::log(rate) + rate * t;
  const double log_f2 = log_a + 2.0 * z + log_norm_cdf(-w * (t * z + 1.0)) +
                        std::log(rate) + rate * t;
  const double p_over_q = std::exp(log_f1) + std::exp(log_f2);
  const double exp_weight = 1.0 / (1.0 + p_over_q);

  while (true) {
    double x;
    if (rng.uniform() < exp_weight) {
      x = t + rng.exponential(1.0) / rate;
    } else {
      x = truncated_inverse_gaussian(z, t, rng);
    }
    // Squeeze on the alternating series until it settles.
    double series = pg_coef(0, x, t);
    const double u = rng.uniform() * series;
    int q = 1;
    while (true) {
      if (q % 2 == 1) {
        series -= pg_coef(q, x, t);
        if (u <= series) return x * 0.25;
      } else {
        series += pg_coef(q, x, t);
        if (u > series) break;
      }
      ++q;
    }
  }
}

}  // namespace

double sample_pg(double c, Rng& rng) { return pg1_draw(c, rng); }

double pg_mean(double c) {
  const double x = std::fabs(c);
  if (x < 1e-4) return 0.25 * (1.0 - x * x / 12.0);
  return std::tanh(x / 2.0) / (2.0 * x);
}

double pg_variance(double c) {
  const double x = std::fabs(c);
  if (x < 1e-3) return 1.0 / 24.0;
  const double ch = std::cosh(x / 2.0);
  return (std::sinh(x) - x) / (4.0 * x * x * x * ch * ch);
}

double update_alpha_beta(const GammaMatrix& gamma, int k, double a_alpha,
                         double b_alpha, Rng& rng) {
  if (k < 0 || k >= gamma.K()) throw std::out_of_range("update_alpha_beta: bad k");
  int ones = 0;
  for (int i = 0; i < gamma.n(); ++i) ones += gamma.at(i, k);
  return rng.beta(a_alpha + ones, b_alpha + gamma.n() - ones);
}

Eigen::Vector2d logistic_design_row(const GammaMatrix& gamma, int i, int k,
                                    int d_gamma) {
  double lag_sum = 0.0;
  for (int q = 1; q <= d_gamma; ++q) lag_sum += gamma.at(i, k - q);
  return Eigen::Vector2d(1.0, lag_sum);
}

void update_alpha_logistic(const GammaMatrix& gamma, const SmrpmConfig& cfg,
                           AlphaState& state, Rng& rng) {
  if (cfg.d_gamma <= 0) {
    throw std::invalid_argument("update_alpha_logistic: requires d_gamma > 0");
  }
  const int n = gamma.n();
  const int K = gamma.K();
  const Eigen::Matrix2d prior_prec = cfg.alpha_prior_cov.inverse();

  // Column 0 is deterministic, so only columns k >= 1 carry Bernoulli terms.
  Eigen::Matrix2d prec = prior_prec;
  Eigen::Vector2d rhs = prior_prec * cfg.alpha_prior_mean;
  for (int k = 1; k < K; ++k) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2d z = logistic_design_row(gamma, i, k, cfg.d_gamma);
      prec.noalias() += state.omega(i, k) * z * z.transpose();
      rhs.noalias() += (gamma.at(i, k) - 0.5) * z;
    }
  }
  Eigen::LLT<Eigen::Matrix2d> llt(prec);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "update_alpha_logistic: posterior precision not PD (trace " +
        std::to_string(prec.trace()) + ", det " + std::to_string(prec.determinant()) + ")");
  }
  const Eigen::Vector2d mean = llt.solve(rhs);
  Eigen::Vector2d noise(rng.normal(0.0, 1.0), rng.normal(0.0, 1.0));
  // alpha = mean + L^{-T} xi has covariance (L L^T)^{-1} = prec^{-1}.
  state.alpha = mean + llt.matrixU().solve(noise);

  if (state.omega.rows() != n || state.omega.cols() != K) {
    state.omega.resize(n, K);
  }
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2d z = logistic_design_row(gamma, i, k, cfg.d_gamma);
      state.omega(i, k) = sample_pg(state.alpha.dot(z), rng);
    }
  }
}

}  // namespace smrpm
