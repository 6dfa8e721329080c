#include "smrpm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace smrpm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (1.8378770664093454836 + std::log(var) + d * d / var);
}

std::size_t pick_from_log_weights(const std::vector<double>& logw, Rng& rng) {
  double hi = kNegInf;
  for (double v : logw) hi = std::max(hi, v);
  if (hi == kNegInf) {
    throw std::logic_error("pick_from_log_weights: no feasible candidate");
  }
  std::vector<double> w(logw.size());
  for (std::size_t r = 0; r < logw.size(); ++r) w[r] = std::exp(logw[r] - hi);
  return rng.categorical(w);
}

// Reassigns unit i at column k, appending auxiliary cluster parameters when a
// new cluster is opened and dropping the parameters of a cluster it empties,
// then restores canonical labels.  chosen_label == -1 opens a new cluster.
void commit_move(ClusterMatrix& clusters, int k, int i, int chosen_label,
                 std::vector<std::vector<double>*> ragged,
                 std::vector<double> aux_values) {
  std::vector<int> raw(clusters.column(k).labels());
  const int fresh = clusters.column(k).num_clusters();
  if (chosen_label < 0) {
    raw[i] = fresh;
    for (std::size_t r = 0; r < ragged.size(); ++r) {
      ragged[r]->push_back(aux_values[r]);
    }
  } else {
    raw[i] = chosen_label;
  }
  std::vector<int> perm(fresh + 1, -1);
  int next = 0;
  for (int lab : raw) {
    if (perm[lab] < 0) perm[lab] = next++;
  }
  std::vector<int> canon(raw.size());
  for (std::size_t u = 0; u < raw.size(); ++u) canon[u] = perm[raw[u]];
  for (auto* values : ragged) {
    std::vector<double> reordered(next, 0.0);
    for (int lab = 0; lab < static_cast<int>(values->size()); ++lab) {
      if (perm[lab] >= 0) reordered[perm[lab]] = (*values)[lab];
    }
    *values = std::move(reordered);
  }
  clusters.set_column(k, LabelVector::from_canonical(std::move(canon)));
}

// log prod over the clusters active in `labels` of
// N(theta(lab); phi * mean of theta_prev over parents, tau2), with the
// cluster carrying the auxiliary coefficient skipped (its factor is common
// to every candidate and cancels).
template <typename ThetaAt>
double log_theta_column_prior(const std::vector<int>& labels,
                              const LabelVector* prev,
                              const std::vector<double>& theta_prev,
                              ThetaAt theta_at, double phi, double tau2,
                              int skip_label, int max_label) {
  std::vector<std::vector<int>> parents(max_label + 1);
  std::vector<char> active(max_label + 1, 0);
  for (std::size_t u = 0; u < labels.size(); ++u) {
    const int lab = labels[u];
    active[lab] = 1;
    if (prev != nullptr) {
      auto& set = parents[lab];
      const int from = prev->label(static_cast<int>(u));
      if (std::find(set.begin(), set.end(), from) == set.end()) set.push_back(from);
    }
  }
  double block = 0.0;
  for (int lab = 0; lab <= max_label; ++lab) {
    if (!active[lab] || lab == skip_label) continue;
    double mean = 0.0;
    if (prev != nullptr) {
      double sum = 0.0;
      for (int l : parents[lab]) sum += theta_prev[l];
      mean = phi * sum / static_cast<double>(parents[lab].size());
    }
    block += log_normal_pdf(theta_at(lab), mean, tau2);
  }
  return block;
}

// log prod over the clusters of the next column of
// N(theta_next[jn]; phi * mean of theta(lab) over the labels feeding jn, tau2).
template <typename ThetaAt>
double log_theta_next_prior(const std::vector<int>& labels, ThetaAt theta_at,
                            const LabelVector& next,
                            const std::vector<double>& theta_next, double phi,
                            double tau2, int max_label) {
  const int J_next = next.num_clusters();
  std::vector<std::vector<int>> parents(J_next);
  for (std::size_t u = 0; u < labels.size(); ++u) {
    auto& set = parents[next.label(static_cast<int>(u))];
    const int from = labels[u];
    if (std::find(set.begin(), set.end(), from) == set.end()) set.push_back(from);
  }
  (void)max_label;
  double block = 0.0;
  for (int jn = 0; jn < J_next; ++jn) {
    double sum = 0.0;
    for (int l : parents[jn]) sum += theta_at(l);
    const double mean = phi * sum / static_cast<double>(parents[jn].size());
    block += log_normal_pdf(theta_next[jn], mean, tau2);
  }
  return block;
}

Eigen::Vector2d sample_bivariate_normal(const Eigen::Vector2d& mean,
                                        const Eigen::Matrix2d& cov, Rng& rng) {
  Eigen::LLT<Eigen::Matrix2d> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("sample_bivariate_normal: covariance not PD");
  }
  Eigen::Vector2d noise(rng.normal(0.0, 1.0), rng.normal(0.0, 1.0));
  return mean + llt.matrixL() * noise;
}

}  // namespace

AssertLevel assert_level_from_env() {
  const char* raw = std::getenv("SMRPM_ASSERT_LEVEL");
  if (raw == nullptr) return AssertLevel::kSampled;
  const std::string level(raw);
  if (level == "off") return AssertLevel::kOff;
  if (level == "sampled") return AssertLevel::kSampled;
  if (level == "full") return AssertLevel::kFull;
  throw std::invalid_argument("SMRPM_ASSERT_LEVEL must be off|sampled|full");
}

void ChainConfig::validate() const {
  if (total_iters <= 0 || burn_in < 0 || burn_in >= total_iters) {
    throw std::invalid_argument("ChainConfig: need 0 <= burn_in < total_iters");
  }
  if (thin < 1) throw std::invalid_argument("ChainConfig: thin must be >= 1");
  smrpm.validate();
}

// ---------------------------------------------------------------------------
// FunctionalGibbs
// ---------------------------------------------------------------------------

FunctionalGibbs::FunctionalGibbs(FunctionalDataset& data, const BasisSpec& basis,
                                 const ChainConfig& cfg, Rng& rng)
    : data_(&data), ctx_(data, basis), cfg_(cfg), eppf_(cfg.smrpm.crp_mass) {
  cfg_.validate();
  const int n = data.n();
  const int K = basis.num_basis();
  clusters_ = ClusterMatrix(n, K);
  gamma_ = GammaMatrix(n, K);

  // Cluster coefficients start at the average of independent per-curve
  // least-squares fits; everything else is drawn from its prior.
  Eigen::VectorXd theta_mean = Eigen::VectorXd::Zero(K);
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd& design = ctx_.design(i);
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
        data.curves[i].y.data(), data.curves[i].y.size());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    Eigen::VectorXd fit;
    if (qr.rank() < K) {
      // Short curves cannot identify every coefficient; shrink the rest.
      ++ridge_fallbacks_;
      Eigen::MatrixXd gram = design.transpose() * design;
      gram.diagonal().array() += 1e-6;
      fit = gram.ldlt().solve(design.transpose() * y);
    } else {
      fit = qr.solve(y);
    }
    theta_mean += fit;
  }
  theta_mean /= static_cast<double>(n);
  state_.hyper = cfg.fn_hyper;
  state_.theta_star.assign(K, {});
  for (int k = 0; k < K; ++k) state_.theta_star[k] = {theta_mean(k)};
  state_.sigma2 = rng.inv_gamma(state_.hyper.a_sigma, state_.hyper.b_sigma);
  state_.tau2 = rng.inv_gamma(state_.hyper.a_tau, state_.hyper.b_tau);
  state_.phi = rng.normal(state_.hyper.m0, std::sqrt(state_.hyper.s0_2));

  alpha_ = sample_alpha_prior(n, K, cfg_.smrpm, rng);
  if (cfg_.smrpm.d_gamma > 0) {
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d z = logistic_design_row(gamma_, i, k, cfg_.smrpm.d_gamma);
        alpha_.omega(i, k) = sample_pg(alpha_.alpha.dot(z), rng);
      }
    }
  }
}

void FunctionalGibbs::set_state(ClusterMatrix clusters, GammaMatrix gamma,
                                FunctionalState state, AlphaState alpha) {
  clusters_ = std::move(clusters);
  gamma_ = std::move(gamma);
  state_ = std::move(state);
  alpha_ = std::move(alpha);
}

void FunctionalGibbs::resimulate_data(Rng& rng) {
  const double sd = std::sqrt(state_.sigma2);
  for (int i = 0; i < ctx_.n(); ++i) {
    for (int m = 0; m < ctx_.num_points(i); ++m) {
      data_->curves[i].y[m] =
          fn_fitted_value(ctx_, clusters_, state_, i, m) + rng.normal(0.0, sd);
    }
  }
}

double FunctionalGibbs::data_loglik() const {
  return fn_data_loglik(ctx_, clusters_, state_);
}

void FunctionalGibbs::move_cluster(int i, int k, Rng& rng) {
  const ClusterPriorWeights weights =
      cluster_prior_weights(i, k, clusters_, gamma_, cfg_.smrpm, eppf_);
  const LabelVector& col = clusters_.column(k);
  const int j0 = col.label(i);
  const int fresh = col.num_clusters();
  const bool singleton = (col.cluster_sizes()[j0] == 1);
  const int K = clusters_.K();

  // Neal algorithm 8 with one auxiliary: a singleton keeps its own
  // coefficient as the auxiliary, otherwise a fresh prior draw.
  double aux;
  if (singleton) {
    aux = state_.theta_star[k][j0];
  } else {
    const double mean =
        (k == 0) ? 0.0
                 : state_.phi * state_.theta_star[k - 1][clusters_.label(i, k - 1)];
    aux = rng.normal(mean, std::sqrt(state_.tau2));
  }

  // Partial residuals of curve i on the support of basis k.
  const auto [first, last] = ctx_.support(i, k);
  const Eigen::MatrixXd& design = ctx_.design(i);
  std::vector<double> partial(last - first), bval(last - first);
  for (int m = first; m < last; ++m) {
    const double b = design(m, k);
    const double fit = fn_fitted_value(ctx_, clusters_, state_, i, m);
    partial[m - first] = ctx_.y(i, m) - (fit - b * state_.theta_star[k][j0]);
    bval[m - first] = b;
  }

  const double sig_prec = 1.0 / state_.sigma2;
  auto theta_at = [&](int lab) {
    return lab == fresh ? aux : state_.theta_star[k][lab];
  };
  std::vector<int> hypo(col.labels());
  std::vector<double> logw(weights.label.size(), kNegInf);
  for (std::size_t cand = 0; cand < weights.label.size(); ++cand) {
    if (!(weights.weight[cand] > 0.0)) continue;
    const int lab = weights.label[cand];
    const int raw = (lab >= 0) ? lab : fresh;
    const double theta_val = theta_at(raw);

    double loglik = 0.0;
    for (std::size_t r = 0; r < partial.size(); ++r) {
      const double d = partial[r] - bval[r] * theta_val;
      loglik -= 0.5 * sig_prec * d * d;
    }

    // The coefficient priors at bases k and k+1 depend on the cluster flow
    // through c_ik, so they belong to the likelihood factor of this move.
    hypo[i] = raw;
    double block = log_theta_column_prior(
        hypo, k > 0 ? &clusters_.column(k - 1) : nullptr,
        k > 0 ? state_.theta_star[k - 1] : std::vector<double>{}, theta_at,
        state_.phi, state_.tau2, /*skip_label=*/fresh, fresh);
    if (k + 1 < K) {
      block += log_theta_next_prior(hypo, theta_at, clusters_.column(k + 1),
                                    state_.theta_star[k + 1], state_.phi,
                                    state_.tau2, fresh);
    }
    logw[cand] = std::log(weights.weight[cand]) + loglik + block;
  }

  const std::size_t pick = pick_from_log_weights(logw, rng);
  commit_move(clusters_, k, i, weights.label[pick], {&state_.theta_star[k]},
              {aux});
}

void FunctionalGibbs::sweep(Rng& rng) {
  const int n = clusters_.n();
  const int K = clusters_.K();
  if (!frozen_partitions_) {
    for (int k = 1; k < K; ++k) {
      for (int i = 0; i < n; ++i) {
        const double p = gamma_full_conditional(i, k, gamma_, clusters_, alpha_,
                                                cfg_.smrpm, eppf_);
        gamma_.set(i, k, rng.bernoulli(p) ? 1 : 0);
      }
    }
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < n; ++i) {
        if (in_fixed_set(gamma_, i, k, cfg_.smrpm.d_rho)) continue;
        move_cluster(i, k, rng);
      }
    }
    if (cfg_.smrpm.d_gamma == 0) {
      alpha_.alpha_k[0] = rng.beta(cfg_.smrpm.a_alpha, cfg_.smrpm.b_alpha);
      for (int k = 1; k < K; ++k) {
        alpha_.alpha_k[k] = update_alpha_beta(gamma_, k, cfg_.smrpm.a_alpha,
                                              cfg_.smrpm.b_alpha, rng);
      }
    } else {
      update_alpha_logistic(gamma_, cfg_.smrpm, alpha_, rng);
    }
  }

  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < clusters_.column(k).num_clusters(); ++j) {
      fn_update_theta_star(k, j, ctx_, clusters_, state_, rng);
    }
  }
  {
    const double saved = state_.hyper.a_sigma;
    if (mutate_sigma_shape_) state_.hyper.a_sigma += 1.0;
    fn_update_sigma2(ctx_, clusters_, state_, rng);
    state_.hyper.a_sigma = saved;
  }
  fn_update_tau2(clusters_, state_, rng);
  fn_update_phi(clusters_, state_, rng);

  ++sweep_count_;
  maybe_check(sweep_count_);
}

void FunctionalGibbs::maybe_check(long iter) {
  if (cfg_.assert_level == AssertLevel::kOff) return;
  if (cfg_.assert_level == AssertLevel::kSampled && iter % 100 != 0) return;
  check_invariants();
}

void FunctionalGibbs::check_invariants() const {
  const_cast<FunctionalGibbs*>(this)->invariant_checks_ += 1;
  for (int k = 0; k < clusters_.K(); ++k) {
    if (static_cast<int>(state_.theta_star[k].size()) !=
        clusters_.column(k).num_clusters()) {
      throw std::logic_error("FunctionalGibbs: theta_star length != J_k at k=" +
                             std::to_string(k));
    }
    if (k == 0) continue;
    const std::vector<int> fixed = fixed_set(gamma_, k, cfg_.smrpm.d_rho);
    if (!compatible(clusters_.column(k - 1), clusters_.column(k), fixed)) {
      std::ostringstream dump;
      dump << "FunctionalGibbs: compatibility violated at k=" << k << "; prev=";
      for (int l : clusters_.column(k - 1).labels()) dump << l;
      dump << " curr=";
      for (int l : clusters_.column(k).labels()) dump << l;
      dump << " fixed={";
      for (int f : fixed) dump << f << ",";
      dump << "}";
      throw std::logic_error(dump.str());
    }
  }
}

// ---------------------------------------------------------------------------
// TimeSeriesGibbs
// ---------------------------------------------------------------------------

TimeSeriesGibbs::TimeSeriesGibbs(TimeSeriesDataset& data, const ChainConfig& cfg,
                                 Rng& rng)
    : data_(&data), cfg_(cfg), eppf_(cfg.smrpm.crp_mass) {
  cfg_.validate();
  const int n = data.n();
  const int K = data.K();
  clusters_ = ClusterMatrix(n, K);
  gamma_ = GammaMatrix(n, K);

  state_.hyper = cfg.ts_hyper;
  state_.phi0 = rng.normal(state_.hyper.m0, std::sqrt(state_.hyper.s0_2));
  state_.lambda2 = rng.inv_gamma(state_.hyper.a_lambda, state_.hyper.b_lambda);
  state_.theta.resize(K);
  state_.tau2.resize(K);
  state_.mu_star.assign(K, {});
  state_.sigma2_star.assign(K, {});
  for (int k = 0; k < K; ++k) {
    state_.theta[k] = rng.normal(state_.phi0, std::sqrt(state_.lambda2));
    state_.tau2[k] = rng.inv_gamma(state_.hyper.a_tau, state_.hyper.b_tau);
    state_.mu_star[k] = {rng.normal(state_.theta[k], std::sqrt(state_.tau2[k]))};
    state_.sigma2_star[k] = {
        rng.inv_gamma(state_.hyper.a_sigma, state_.hyper.b_sigma)};
  }

  alpha_ = sample_alpha_prior(n, K, cfg_.smrpm, rng);
  if (cfg_.smrpm.d_gamma > 0) {
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d z = logistic_design_row(gamma_, i, k, cfg_.smrpm.d_gamma);
        alpha_.omega(i, k) = sample_pg(alpha_.alpha.dot(z), rng);
      }
    }
  }
}

void TimeSeriesGibbs::set_state(ClusterMatrix clusters, GammaMatrix gamma,
                                TimeSeriesState state, AlphaState alpha) {
  clusters_ = std::move(clusters);
  gamma_ = std::move(gamma);
  state_ = std::move(state);
  alpha_ = std::move(alpha);
}

void TimeSeriesGibbs::resimulate_data(Rng& rng) {
  for (int k = 0; k < data_->K(); ++k) {
    for (int i = 0; i < data_->n(); ++i) {
      const int j = clusters_.label(i, k);
      data_->y(i, k) = rng.normal(state_.mu_star[k][j],
                                  std::sqrt(state_.sigma2_star[k][j]));
    }
  }
}

double TimeSeriesGibbs::data_loglik() const {
  return ts_data_loglik(*data_, clusters_, state_);
}

void TimeSeriesGibbs::move_cluster(int i, int k, Rng& rng) {
  const ClusterPriorWeights weights =
      cluster_prior_weights(i, k, clusters_, gamma_, cfg_.smrpm, eppf_);
  const LabelVector& col = clusters_.column(k);
  const int j0 = col.label(i);
  const bool singleton = (col.cluster_sizes()[j0] == 1);

  double mu_aux, s2_aux;
  if (singleton) {
    mu_aux = state_.mu_star[k][j0];
    s2_aux = state_.sigma2_star[k][j0];
  } else {
    mu_aux = rng.normal(state_.theta[k], std::sqrt(state_.tau2[k]));
    s2_aux = rng.inv_gamma(state_.hyper.a_sigma, state_.hyper.b_sigma);
  }

  const double y = data_->y(i, k);
  std::vector<double> logw(weights.label.size(), kNegInf);
  for (std::size_t cand = 0; cand < weights.label.size(); ++cand) {
    if (!(weights.weight[cand] > 0.0)) continue;
    const int lab = weights.label[cand];
    const double mu = (lab >= 0) ? state_.mu_star[k][lab] : mu_aux;
    const double s2 = (lab >= 0) ? state_.sigma2_star[k][lab] : s2_aux;
    logw[cand] = std::log(weights.weight[cand]) + ts_loglik(y, mu, s2);
  }
  const std::size_t pick = pick_from_log_weights(logw, rng);
  commit_move(clusters_, k, i, weights.label[pick],
              {&state_.mu_star[k], &state_.sigma2_star[k]}, {mu_aux, s2_aux});
}

void TimeSeriesGibbs::sweep(Rng& rng) {
  const int n = clusters_.n();
  const int K = clusters_.K();
  if (!frozen_partitions_) {
    for (int k = 1; k < K; ++k) {
      for (int i = 0; i < n; ++i) {
        const double p = gamma_full_conditional(i, k, gamma_, clusters_, alpha_,
                                                cfg_.smrpm, eppf_);
        gamma_.set(i, k, rng.bernoulli(p) ? 1 : 0);
      }
    }
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < n; ++i) {
        if (in_fixed_set(gamma_, i, k, cfg_.smrpm.d_rho)) continue;
        move_cluster(i, k, rng);
      }
    }
    if (cfg_.smrpm.d_gamma == 0) {
      alpha_.alpha_k[0] = rng.beta(cfg_.smrpm.a_alpha, cfg_.smrpm.b_alpha);
      for (int k = 1; k < K; ++k) {
        alpha_.alpha_k[k] = update_alpha_beta(gamma_, k, cfg_.smrpm.a_alpha,
                                              cfg_.smrpm.b_alpha, rng);
      }
    } else {
      update_alpha_logistic(gamma_, cfg_.smrpm, alpha_, rng);
    }
  }

  {
    const double saved = state_.hyper.a_sigma;
    if (mutate_sigma_shape_) state_.hyper.a_sigma += 1.0;
    ts_update_params(*data_, clusters_, state_, rng);
    state_.hyper.a_sigma = saved;
  }

  ++sweep_count_;
  maybe_check(sweep_count_);
}

void TimeSeriesGibbs::maybe_check(long iter) {
  if (cfg_.assert_level == AssertLevel::kOff) return;
  if (cfg_.assert_level == AssertLevel::kSampled && iter % 100 != 0) return;
  check_invariants();
}

void TimeSeriesGibbs::check_invariants() const {
  const_cast<TimeSeriesGibbs*>(this)->invariant_checks_ += 1;
  for (int k = 0; k < clusters_.K(); ++k) {
    const int J = clusters_.column(k).num_clusters();
    if (static_cast<int>(state_.mu_star[k].size()) != J ||
        static_cast<int>(state_.sigma2_star[k].size()) != J) {
      throw std::logic_error("TimeSeriesGibbs: ragged arrays out of sync at k=" +
                             std::to_string(k));
    }
    if (k == 0) continue;
    const std::vector<int> fixed = fixed_set(gamma_, k, cfg_.smrpm.d_rho);
    if (!compatible(clusters_.column(k - 1), clusters_.column(k), fixed)) {
      throw std::logic_error("TimeSeriesGibbs: compatibility violated at k=" +
                             std::to_string(k));
    }
  }
}

// ---------------------------------------------------------------------------
// Chain drivers
// ---------------------------------------------------------------------------

namespace {

template <typename Sampler, typename StoreState>
ChainOutput drive_chain(Sampler& sampler, const ChainConfig& cfg, Rng& rng,
                        StoreState store_state) {
  ChainOutput out;
  out.loglik_trace.reserve(cfg.total_iters);
  for (int iter = 1; iter <= cfg.total_iters; ++iter) {
    sampler.sweep(rng);
    out.loglik_trace.push_back(sampler.data_loglik());
    if (iter > cfg.burn_in && (iter - cfg.burn_in) % cfg.thin == 0) {
      out.partitions.push_back(sampler.clusters());
      out.gammas.push_back(sampler.gamma());
      out.alpha_states.push_back(sampler.alpha());
      store_state(out);
    }
  }
  sampler.check_invariants();
  out.invariant_checks = sampler.invariant_checks();
  return out;
}

}  // namespace

ChainOutput run_chain(FunctionalDataset& data, const BasisSpec& basis,
                      const ChainConfig& cfg) {
  Rng rng(cfg.seed);
  FunctionalGibbs sampler(data, basis, cfg, rng);
  ChainOutput out = drive_chain(sampler, cfg, rng, [&](ChainOutput& chain) {
    chain.fn_states.push_back(sampler.state());
  });
  out.ridge_fallbacks = sampler.ridge_fallbacks();
  return out;
}

ChainOutput run_chain(TimeSeriesDataset& data, const ChainConfig& cfg) {
  Rng rng(cfg.seed);
  TimeSeriesGibbs sampler(data, cfg, rng);
  return drive_chain(sampler, cfg, rng, [&](ChainOutput& chain) {
    chain.ts_states.push_back(sampler.state());
  });
}

// ---------------------------------------------------------------------------
// Prior simulation
// ---------------------------------------------------------------------------

AlphaState sample_alpha_prior(int n, int K, const SmrpmConfig& cfg, Rng& rng) {
  AlphaState alpha;
  if (cfg.d_gamma == 0) {
    alpha.alpha_k.resize(K);
    for (int k = 0; k < K; ++k) {
      alpha.alpha_k[k] = rng.beta(cfg.a_alpha, cfg.b_alpha);
    }
  } else {
    alpha.alpha = sample_bivariate_normal(cfg.alpha_prior_mean,
                                          cfg.alpha_prior_cov, rng);
    alpha.omega = Eigen::MatrixXd::Ones(n, K);
  }
  return alpha;
}

void sample_smrpm_prior(int n, int K, const SmrpmConfig& cfg, AlphaState& alpha,
                        const Eppf& eppf, Rng& rng, ClusterMatrix* clusters,
                        GammaMatrix* gamma) {
  const std::vector<LabelVector> parts = all_partitions(n);
  std::vector<double> weights(parts.size());
  for (std::size_t p = 0; p < parts.size(); ++p) {
    weights[p] = std::exp(eppf.log_eppf(parts[p]));
  }
  *clusters = ClusterMatrix(n, K);
  *gamma = GammaMatrix(n, K);
  clusters->set_column(0, parts[rng.categorical(weights)]);

  std::vector<double> masked(parts.size());
  for (int k = 1; k < K; ++k) {
    for (int i = 0; i < n; ++i) {
      double p;
      if (cfg.d_gamma == 0) {
        p = alpha.alpha_k[k];
      } else {
        const Eigen::Vector2d z = logistic_design_row(*gamma, i, k, cfg.d_gamma);
        const double eta = alpha.alpha.dot(z);
        p = 1.0 / (1.0 + std::exp(-eta));
      }
      gamma->set(i, k, rng.bernoulli(p) ? 1 : 0);
    }
    const std::vector<int> fixed = fixed_set(*gamma, k, cfg.d_rho);
    const LabelVector prev_reduced = clusters->column(k - 1).reduce(fixed);
    for (std::size_t p = 0; p < parts.size(); ++p) {
      masked[p] = (parts[p].reduce(fixed) == prev_reduced) ? weights[p] : 0.0;
    }
    clusters->set_column(k, parts[rng.categorical(masked)]);
  }

  if (cfg.d_gamma > 0) {
    // omega is conditionally independent of gamma given alpha and the design.
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d z = logistic_design_row(*gamma, i, k, cfg.d_gamma);
        alpha.omega(i, k) = sample_pg(alpha.alpha.dot(z), rng);
      }
    }
  }
}

FunctionalState sample_functional_prior(const ClusterMatrix& clusters,
                                        const FunctionalHyper& hyper, Rng& rng) {
  FunctionalState state;
  state.hyper = hyper;
  state.sigma2 = rng.inv_gamma(hyper.a_sigma, hyper.b_sigma);
  state.tau2 = rng.inv_gamma(hyper.a_tau, hyper.b_tau);
  state.phi = rng.normal(hyper.m0, std::sqrt(hyper.s0_2));
  const int K = clusters.K();
  state.theta_star.assign(K, {});
  const double sd = std::sqrt(state.tau2);
  for (int k = 0; k < K; ++k) {
    const int J = clusters.column(k).num_clusters();
    state.theta_star[k].resize(J);
    if (k == 0) {
      for (int j = 0; j < J; ++j) state.theta_star[0][j] = rng.normal(0.0, sd);
      continue;
    }
    const auto parents = backward_sets(clusters.column(k - 1), clusters.column(k));
    for (int j = 0; j < J; ++j) {
      const double mean =
          state.phi * parent_mean(parents[j], state.theta_star[k - 1]);
      state.theta_star[k][j] = rng.normal(mean, sd);
    }
  }
  return state;
}

TimeSeriesState sample_ts_prior(const ClusterMatrix& clusters,
                                const TimeSeriesHyper& hyper, Rng& rng) {
  TimeSeriesState state;
  state.hyper = hyper;
  const int K = clusters.K();
  state.phi0 = rng.normal(hyper.m0, std::sqrt(hyper.s0_2));
  state.lambda2 = rng.inv_gamma(hyper.a_lambda, hyper.b_lambda);
  state.theta.resize(K);
  state.tau2.resize(K);
  state.mu_star.assign(K, {});
  state.sigma2_star.assign(K, {});
  for (int k = 0; k < K; ++k) {
    state.theta[k] = rng.normal(state.phi0, std::sqrt(state.lambda2));
    state.tau2[k] = rng.inv_gamma(hyper.a_tau, hyper.b_tau);
    const int J = clusters.column(k).num_clusters();
    state.mu_star[k].resize(J);
    state.sigma2_star[k].resize(J);
    for (int j = 0; j < J; ++j) {
      state.mu_star[k][j] = rng.normal(state.theta[k], std::sqrt(state.tau2[k]));
      state.sigma2_star[k][j] = rng.inv_gamma(hyper.a_sigma, hyper.b_sigma);
    }
  }
  return state;
}

// ---------------------------------------------------------------------------
// Enumeration oracle and prior-only Gibbs
// ---------------------------------------------------------------------------

double JointTable::total() const {
  double sum = 0.0;
  for (const auto& entry : entries) sum += entry.prob;
  return sum;
}

std::map<std::vector<int>, double> JointTable::partition_marginal() const {
  std::map<std::vector<int>, double> marginal;
  for (const auto& entry : entries) {
    std::vector<int> key;
    key.reserve(static_cast<std::size_t>(n) * K);
    for (const auto& column : entry.partitions) {
      key.insert(key.end(), column.labels().begin(), column.labels().end());
    }
    marginal[key] += entry.prob;
  }
  return marginal;
}

JointTable enumerate_joint(int n, int K, int d_rho, double alpha_fixed,
                           const Eppf& eppf) {
  if (n < 1 || K < 1) throw std::invalid_argument("enumerate_joint: bad size");
  const std::vector<LabelVector> parts = all_partitions(n);
  const double bell = static_cast<double>(parts.size());
  const double states = std::pow(bell, K) * std::pow(2.0, n * (K - 1));
  if (states > 2e6) {
    throw std::invalid_argument("enumerate_joint: instance too large to tabulate");
  }
  std::vector<double> eppf_value(parts.size());
  for (std::size_t p = 0; p < parts.size(); ++p) {
    eppf_value[p] = std::exp(eppf.log_eppf(parts[p]));
  }

  JointTable table;
  table.n = n;
  table.K = K;

  const int gamma_bits = n * (K - 1);
  std::vector<int> seq(K, 0);
  for (std::uint64_t mask = 0; mask < (1ULL << gamma_bits); ++mask) {
    GammaMatrix gamma(n, K);
    double prob_gamma = 1.0;
    for (int k = 1; k < K; ++k) {
      for (int i = 0; i < n; ++i) {
        const int bit = (mask >> ((k - 1) * n + i)) & 1;
        gamma.set(i, k, static_cast<int>(bit));
        prob_gamma *= bit ? alpha_fixed : (1.0 - alpha_fixed);
      }
    }
    std::vector<std::vector<int>> fixed(K);
    for (int k = 1; k < K; ++k) fixed[k] = fixed_set(gamma, k, d_rho);

    std::fill(seq.begin(), seq.end(), 0);
    while (true) {
      double prob = prob_gamma * eppf_value[seq[0]];
      for (int k = 1; k < K && prob > 0.0; ++k) {
        const LabelVector& prev = parts[seq[k - 1]];
        const LabelVector& curr = parts[seq[k]];
        const LabelVector prev_reduced = prev.reduce(fixed[k]);
        if (!(curr.reduce(fixed[k]) == prev_reduced)) {
          prob = 0.0;
          break;
        }
        double normalizer = 0.0;
        for (std::size_t p = 0; p < parts.size(); ++p) {
          if (parts[p].reduce(fixed[k]) == prev_reduced) {
            normalizer += eppf_value[p];
          }
        }
        prob *= eppf_value[seq[k]] / normalizer;
      }
      JointTable::Entry entry;
      entry.gamma = gamma;
      entry.partitions.reserve(K);
      for (int k = 0; k < K; ++k) entry.partitions.push_back(parts[seq[k]]);
      entry.prob = prob;
      table.entries.push_back(std::move(entry));

      int pos = K - 1;
      while (pos >= 0 && seq[pos] + 1 == static_cast<int>(parts.size())) {
        seq[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
      ++seq[pos];
    }
  }
  return table;
}

PriorOnlyGibbs::PriorOnlyGibbs(int n, int K, const SmrpmConfig& cfg,
                               double alpha_fixed)
    : cfg_(cfg), eppf_(cfg.crp_mass), clusters_(n, K), gamma_(n, K) {
  if (cfg_.d_gamma != 0) {
    throw std::invalid_argument("PriorOnlyGibbs: fixed alpha requires d_gamma=0");
  }
  alpha_.alpha_k.assign(K, alpha_fixed);
}

void PriorOnlyGibbs::sweep(Rng& rng) {
  const int n = clusters_.n();
  const int K = clusters_.K();
  for (int k = 1; k < K; ++k) {
    for (int i = 0; i < n; ++i) {
      const double p =
          gamma_full_conditional(i, k, gamma_, clusters_, alpha_, cfg_, eppf_);
      gamma_.set(i, k, rng.bernoulli(p) ? 1 : 0);
    }
  }
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < n; ++i) {
      if (in_fixed_set(gamma_, i, k, cfg_.d_rho)) continue;
      const ClusterPriorWeights weights =
          cluster_prior_weights(i, k, clusters_, gamma_, cfg_, eppf_);
      const std::size_t pick = rng.categorical(weights.weight);
      commit_move(clusters_, k, i, weights.label[pick], {}, {});
    }
  }
}

double prior_gibbs_total_variation(int n, int K, const SmrpmConfig& cfg,
                                   double alpha_fixed, long sweeps,
                                   std::uint64_t seed) {
  const JointTable table = enumerate_joint(n, K, cfg.d_rho, alpha_fixed,
                                           CrpEppf(cfg.crp_mass));
  const std::map<std::vector<int>, double> exact = table.partition_marginal();

  PriorOnlyGibbs chain(n, K, cfg, alpha_fixed);
  Rng rng(seed);
  std::map<std::vector<int>, long> counts;
  const long warmup = 1000;
  for (long s = 0; s < warmup; ++s) chain.sweep(rng);
  for (long s = 0; s < sweeps; ++s) {
    chain.sweep(rng);
    std::vector<int> key;
    key.reserve(static_cast<std::size_t>(n) * K);
    for (int k = 0; k < K; ++k) {
      const auto& labels = chain.clusters().column(k).labels();
      key.insert(key.end(), labels.begin(), labels.end());
    }
    counts[key] += 1;
  }
  double tv = 0.0;
  for (const auto& [key, prob] : exact) {
    const auto it = counts.find(key);
    const double emp = (it == counts.end())
                           ? 0.0
                           : static_cast<double>(it->second) / sweeps;
    tv += std::abs(emp - prob);
  }
  return 0.5 * tv;
}

}  // namespace smrpm
