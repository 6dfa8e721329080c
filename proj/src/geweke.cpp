#include <cmath>
#include <stdexcept>

#include "smrpm/inference.hpp"

namespace smrpm {

namespace {

// Shared scalar battery over the smRPM block.
void smrpm_stats(const ClusterMatrix& clusters, const GammaMatrix& gamma,
                 const AlphaState& alpha, const SmrpmConfig& cfg,
                 std::vector<std::string>* names, std::vector<double>* values) {
  const int n = clusters.n();
  const int K = clusters.K();
  double gamma_sum = 0.0;
  for (int k = 1; k < K; ++k) {
    for (int i = 0; i < n; ++i) gamma_sum += gamma.at(i, k);
  }
  double j_sum = 0.0, j2_sum = 0.0;
  for (int k = 0; k < K; ++k) {
    const double J = clusters.column(k).num_clusters();
    j_sum += J;
    j2_sum += J * J;
  }
  names->insert(names->end(), {"mean_gamma", "mean_J", "mean_J2"});
  values->insert(values->end(),
                 {gamma_sum / (n * (K - 1)), j_sum / K, j2_sum / K});
  if (cfg.d_gamma == 0) {
    double a_sum = 0.0;
    for (int k = 1; k < K; ++k) a_sum += alpha.alpha_k[k];
    names->push_back("mean_alpha");
    values->push_back(a_sum / (K - 1));
  } else {
    names->insert(names->end(), {"alpha0", "alpha1", "mean_omega"});
    double omega_sum = 0.0;
    for (int k = 1; k < K; ++k) {
      for (int i = 0; i < n; ++i) omega_sum += alpha.omega(i, k);
    }
    values->insert(values->end(),
                   {alpha.alpha(0), alpha.alpha(1), omega_sum / (n * (K - 1))});
  }
}

void functional_stats(const ClusterMatrix& clusters, const GammaMatrix& gamma,
                      const FunctionalState& state, const AlphaState& alpha,
                      const FunctionalDataset& data, const SmrpmConfig& cfg,
                      std::vector<std::string>* names,
                      std::vector<double>* values) {
  smrpm_stats(clusters, gamma, alpha, cfg, names, values);
  double theta_sum = 0.0, theta2_sum = 0.0;
  for (const auto& column : state.theta_star) {
    double s = 0.0, s2 = 0.0;
    for (double t : column) {
      s += t;
      s2 += t * t;
    }
    theta_sum += s / column.size();
    theta2_sum += s2 / column.size();
  }
  const double K = static_cast<double>(state.theta_star.size());
  double y_sum = 0.0, y2_sum = 0.0;
  long points = 0;
  for (const auto& curve : data.curves) {
    for (double y : curve.y) {
      y_sum += y;
      y2_sum += y * y;
      ++points;
    }
  }
  names->insert(names->end(), {"sigma2", "tau2", "phi", "phi2", "mean_theta",
                               "mean_theta2", "mean_y", "mean_y2"});
  values->insert(values->end(),
                 {state.sigma2, state.tau2, state.phi, state.phi * state.phi,
                  theta_sum / K, theta2_sum / K, y_sum / points,
                  y2_sum / points});
}

void timeseries_stats(const ClusterMatrix& clusters, const GammaMatrix& gamma,
                      const TimeSeriesState& state, const AlphaState& alpha,
                      const TimeSeriesDataset& data, const SmrpmConfig& cfg,
                      std::vector<std::string>* names,
                      std::vector<double>* values) {
  smrpm_stats(clusters, gamma, alpha, cfg, names, values);
  const double K = static_cast<double>(state.theta.size());
  double theta_sum = 0.0, tau_sum = 0.0, mu_sum = 0.0, mu2_sum = 0.0,
         s2_sum = 0.0;
  for (std::size_t k = 0; k < state.theta.size(); ++k) {
    theta_sum += state.theta[k];
    tau_sum += state.tau2[k];
    double mu = 0.0, mu2 = 0.0, s2 = 0.0;
    for (std::size_t j = 0; j < state.mu_star[k].size(); ++j) {
      mu += state.mu_star[k][j];
      mu2 += state.mu_star[k][j] * state.mu_star[k][j];
      s2 += state.sigma2_star[k][j];
    }
    mu_sum += mu / state.mu_star[k].size();
    mu2_sum += mu2 / state.mu_star[k].size();
    s2_sum += s2 / state.mu_star[k].size();
  }
  const double y_sum = data.y.sum();
  const double y2_sum = data.y.array().square().sum();
  const double points = static_cast<double>(data.y.size());
  names->insert(names->end(),
                {"phi0", "phi0_2", "lambda2", "mean_theta_k", "mean_tau2",
                 "mean_mu", "mean_mu2", "mean_sigma2_star", "mean_y", "mean_y2"});
  values->insert(values->end(),
                 {state.phi0, state.phi0 * state.phi0, state.lambda2,
                  theta_sum / K, tau_sum / K, mu_sum / K, mu2_sum / K,
                  s2_sum / K, y_sum / points, y2_sum / points});
}

std::vector<GewekeStat> compare_runs(const std::vector<std::string>& names,
                                     const std::vector<double>& mc_sum,
                                     const std::vector<double>& mc_sumsq,
                                     const std::vector<std::vector<double>>& chain,
                                     long rounds) {
  std::vector<GewekeStat> out;
  const int num_batches = rounds >= 2000 ? 100 : std::max(2L, rounds / 20);
  const long batch_len = rounds / num_batches;
  for (std::size_t s = 0; s < names.size(); ++s) {
    GewekeStat stat;
    stat.name = names[s];
    stat.mean_prior = mc_sum[s] / rounds;
    const double mc_var =
        mc_sumsq[s] / rounds - stat.mean_prior * stat.mean_prior;

    double chain_sum = 0.0;
    for (double v : chain[s]) chain_sum += v;
    stat.mean_chain = chain_sum / chain[s].size();

    // Batch means absorb the autocorrelation of the successive-conditional
    // chain.
    double bm_sum = 0.0, bm_sumsq = 0.0;
    for (int b = 0; b < num_batches; ++b) {
      double m = 0.0;
      for (long r = b * batch_len; r < (b + 1) * batch_len; ++r) m += chain[s][r];
      m /= batch_len;
      bm_sum += m;
      bm_sumsq += m * m;
    }
    const double bm_mean = bm_sum / num_batches;
    const double bm_var = bm_sumsq / num_batches - bm_mean * bm_mean;
    const double se2 = mc_var / rounds + bm_var / num_batches;
    stat.se = std::sqrt(se2);
    stat.z = (stat.mean_prior - stat.mean_chain) / stat.se;
    out.push_back(stat);
  }
  return out;
}

}  // namespace

std::vector<GewekeStat> geweke_functional(FunctionalDataset& data,
                                          const BasisSpec& basis,
                                          const ChainConfig& cfg,
                                          const GewekeOptions& opts) {
  if (opts.rounds <= 0) {
    throw std::invalid_argument("geweke_functional: rounds must be positive");
  }
  const int n = data.n();
  const int K = basis.num_basis();
  const CrpEppf eppf(cfg.smrpm.crp_mass);
  const FunctionalContext ctx(data, basis);

  std::vector<std::string> names;
  std::vector<double> values;

  // Marginal-conditional side: independent prior + data draws.
  Rng rng_mc(mix_seed(opts.seed, 1));
  std::vector<double> mc_sum, mc_sumsq;
  for (long round = 0; round < opts.rounds; ++round) {
    AlphaState alpha = sample_alpha_prior(n, K, cfg.smrpm, rng_mc);
    ClusterMatrix clusters;
    GammaMatrix gamma;
    sample_smrpm_prior(n, K, cfg.smrpm, alpha, eppf, rng_mc, &clusters, &gamma);
    FunctionalState state = sample_functional_prior(clusters, cfg.fn_hyper, rng_mc);
    const double sd = std::sqrt(state.sigma2);
    for (int i = 0; i < n; ++i) {
      for (int m = 0; m < ctx.num_points(i); ++m) {
        data.curves[i].y[m] =
            fn_fitted_value(ctx, clusters, state, i, m) + rng_mc.normal(0.0, sd);
      }
    }
    names.clear();
    values.clear();
    functional_stats(clusters, gamma, state, alpha, data, cfg.smrpm, &names,
                     &values);
    if (mc_sum.empty()) {
      mc_sum.assign(values.size(), 0.0);
      mc_sumsq.assign(values.size(), 0.0);
    }
    for (std::size_t s = 0; s < values.size(); ++s) {
      mc_sum[s] += values[s];
      mc_sumsq[s] += values[s] * values[s];
    }
  }

  // Successive-conditional side: alternate data simulation and Gibbs sweeps.
  Rng rng_sc(mix_seed(opts.seed, 2));
  FunctionalGibbs sampler(data, basis, cfg, rng_sc);
  {
    AlphaState alpha = sample_alpha_prior(n, K, cfg.smrpm, rng_sc);
    ClusterMatrix clusters;
    GammaMatrix gamma;
    sample_smrpm_prior(n, K, cfg.smrpm, alpha, eppf, rng_sc, &clusters, &gamma);
    FunctionalState state = sample_functional_prior(clusters, cfg.fn_hyper, rng_sc);
    sampler.set_state(std::move(clusters), std::move(gamma), std::move(state),
                      std::move(alpha));
  }
  sampler.mutate_sigma_shape(opts.mutate_shape);
  sampler.resimulate_data(rng_sc);
  std::vector<std::vector<double>> chain(mc_sum.size());
  for (auto& series : chain) series.reserve(opts.rounds);
  for (long round = 0; round < opts.rounds; ++round) {
    sampler.sweep(rng_sc);
    sampler.resimulate_data(rng_sc);
    names.clear();
    values.clear();
    functional_stats(sampler.clusters(), sampler.gamma(), sampler.state(),
                     sampler.alpha(), data, cfg.smrpm, &names, &values);
    for (std::size_t s = 0; s < values.size(); ++s) chain[s].push_back(values[s]);
  }
  return compare_runs(names, mc_sum, mc_sumsq, chain, opts.rounds);
}

std::vector<GewekeStat> geweke_timeseries(int n, int K, const ChainConfig& cfg,
                                          const GewekeOptions& opts) {
  if (opts.rounds <= 0) {
    throw std::invalid_argument("geweke_timeseries: rounds must be positive");
  }
  const CrpEppf eppf(cfg.smrpm.crp_mass);
  TimeSeriesDataset data;
  data.ids.resize(n);
  data.y = Eigen::MatrixXd::Zero(n, K);

  std::vector<std::string> names;
  std::vector<double> values;

  Rng rng_mc(mix_seed(opts.seed, 1));
  std::vector<double> mc_sum, mc_sumsq;
  for (long round = 0; round < opts.rounds; ++round) {
    AlphaState alpha = sample_alpha_prior(n, K, cfg.smrpm, rng_mc);
    ClusterMatrix clusters;
    GammaMatrix gamma;
    sample_smrpm_prior(n, K, cfg.smrpm, alpha, eppf, rng_mc, &clusters, &gamma);
    TimeSeriesState state = sample_ts_prior(clusters, cfg.ts_hyper, rng_mc);
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < n; ++i) {
        const int j = clusters.label(i, k);
        data.y(i, k) = rng_mc.normal(state.mu_star[k][j],
                                     std::sqrt(state.sigma2_star[k][j]));
      }
    }
    names.clear();
    values.clear();
    timeseries_stats(clusters, gamma, state, alpha, data, cfg.smrpm, &names,
                     &values);
    if (mc_sum.empty()) {
      mc_sum.assign(values.size(), 0.0);
      mc_sumsq.assign(values.size(), 0.0);
    }
    for (std::size_t s = 0; s < values.size(); ++s) {
      mc_sum[s] += values[s];
      mc_sumsq[s] += values[s] * values[s];
    }
  }

  Rng rng_sc(mix_seed(opts.seed, 2));
  TimeSeriesGibbs sampler(data, cfg, rng_sc);
  {
    AlphaState alpha = sample_alpha_prior(n, K, cfg.smrpm, rng_sc);
    ClusterMatrix clusters;
    GammaMatrix gamma;
    sample_smrpm_prior(n, K, cfg.smrpm, alpha, eppf, rng_sc, &clusters, &gamma);
    TimeSeriesState state = sample_ts_prior(clusters, cfg.ts_hyper, rng_sc);
    sampler.set_state(std::move(clusters), std::move(gamma), std::move(state),
                      std::move(alpha));
  }
  sampler.mutate_sigma_shape(opts.mutate_shape);
  sampler.resimulate_data(rng_sc);
  std::vector<std::vector<double>> chain(mc_sum.size());
  for (auto& series : chain) series.reserve(opts.rounds);
  for (long round = 0; round < opts.rounds; ++round) {
    sampler.sweep(rng_sc);
    sampler.resimulate_data(rng_sc);
    names.clear();
    values.clear();
    timeseries_stats(sampler.clusters(), sampler.gamma(), sampler.state(),
                     sampler.alpha(), data, cfg.smrpm, &names, &values);
    for (std::size_t s = 0; s < values.size(); ++s) chain[s].push_back(values[s]);
  }
  return compare_runs(names, mc_sum, mc_sumsq, chain, opts.rounds);
}

}  // namespace smrpm
