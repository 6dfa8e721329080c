#ifndef SMRPM_INFERENCE_HPP_
#define SMRPM_INFERENCE_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "smrpm/models.hpp"
#include "smrpm/partition.hpp"
#include "smrpm/prior.hpp"
#include "smrpm/rng.hpp"

namespace smrpm {

enum class ModelKind { kFunctional, kTimeSeries };

// How often the samplers verify their own invariants (compatibility of the
// partition sequence, ragged-array shapes).  Controlled by the
// SMRPM_ASSERT_LEVEL environment variable: off | sampled | full.
enum class AssertLevel { kOff, kSampled, kFull };
AssertLevel assert_level_from_env();

struct ChainConfig {
  int total_iters = 10000;
  int burn_in = 5000;
  int thin = 5;
  std::uint64_t seed = 1;
  ModelKind model = ModelKind::kFunctional;
  SmrpmConfig smrpm;
  FunctionalHyper fn_hyper;
  TimeSeriesHyper ts_hyper;
  AssertLevel assert_level = AssertLevel::kSampled;

  int num_samples() const { return (total_iters - burn_in) / thin; }
  void validate() const;
};

struct ChainOutput {
  std::vector<ClusterMatrix> partitions;
  std::vector<GammaMatrix> gammas;
  std::vector<FunctionalState> fn_states;
  std::vector<TimeSeriesState> ts_states;
  std::vector<AlphaState> alpha_states;
  std::vector<double> loglik_trace;  // one entry per iteration
  long invariant_checks = 0;
  int ridge_fallbacks = 0;
};

// ---------------------------------------------------------------------------
// Samplers.  One instance owns the Gibbs state for one chain; the dataset is
// borrowed and must outlive the sampler.  Only the observation values may be
// mutated externally (the Geweke harness re-simulates them in place).
// ---------------------------------------------------------------------------

class FunctionalGibbs {
 public:
  FunctionalGibbs(FunctionalDataset& data, const BasisSpec& basis,
                  const ChainConfig& cfg, Rng& rng);

  void sweep(Rng& rng);

  const ClusterMatrix& clusters() const { return clusters_; }
  const GammaMatrix& gamma() const { return gamma_; }
  const FunctionalState& state() const { return state_; }
  const AlphaState& alpha() const { return alpha_; }
  const FunctionalContext& context() const { return ctx_; }

  void set_state(ClusterMatrix clusters, GammaMatrix gamma,
                 FunctionalState state, AlphaState alpha);

  // Freezes the partition sequence: gamma/cluster/alpha blocks are skipped
  // and only the model parameters move.  Used for conditional estimates.
  void freeze_partitions(bool frozen) { frozen_partitions_ = frozen; }

  // Draws Y | state into the borrowed dataset (evaluation points unchanged).
  void resimulate_data(Rng& rng);

  double data_loglik() const;
  void check_invariants() const;  // throws std::logic_error on violation

  long invariant_checks() const { return invariant_checks_; }
  int ridge_fallbacks() const { return ridge_fallbacks_; }

  // Test hook: adds an off-by-one to the sigma2 shape inside the sweep, used
  // by the Geweke harness to confirm the test detects a corrupted update.
  void mutate_sigma_shape(bool on) { mutate_sigma_shape_ = on; }

 private:
  void move_cluster(int i, int k, Rng& rng);
  void maybe_check(long iter);

  FunctionalDataset* data_;
  FunctionalContext ctx_;
  ChainConfig cfg_;
  CrpEppf eppf_;
  ClusterMatrix clusters_;
  GammaMatrix gamma_;
  FunctionalState state_;
  AlphaState alpha_;
  bool frozen_partitions_ = false;
  bool mutate_sigma_shape_ = false;
  long sweep_count_ = 0;
  long invariant_checks_ = 0;
  int ridge_fallbacks_ = 0;
};

class TimeSeriesGibbs {
 public:
  TimeSeriesGibbs(TimeSeriesDataset& data, const ChainConfig& cfg, Rng& rng);

  void sweep(Rng& rng);

  const ClusterMatrix& clusters() const { return clusters_; }
  const GammaMatrix& gamma() const { return gamma_; }
  const TimeSeriesState& state() const { return state_; }
  const AlphaState& alpha() const { return alpha_; }

  void set_state(ClusterMatrix clusters, GammaMatrix gamma, TimeSeriesState state,
                 AlphaState alpha);
  void freeze_partitions(bool frozen) { frozen_partitions_ = frozen; }
  void resimulate_data(Rng& rng);
  double data_loglik() const;
  void check_invariants() const;
  long invariant_checks() const { return invariant_checks_; }
  void mutate_sigma_shape(bool on) { mutate_sigma_shape_ = on; }

 private:
  void move_cluster(int i, int k, Rng& rng);
  void maybe_check(long iter);

  TimeSeriesDataset* data_;
  ChainConfig cfg_;
  CrpEppf eppf_;
  ClusterMatrix clusters_;
  GammaMatrix gamma_;
  TimeSeriesState state_;
  AlphaState alpha_;
  bool frozen_partitions_ = false;
  bool mutate_sigma_shape_ = false;
  long sweep_count_ = 0;
  long invariant_checks_ = 0;
};

// Burn-in, thinning and storage around the samplers; deterministic given the
// seed.
ChainOutput run_chain(FunctionalDataset& data, const BasisSpec& basis,
                      const ChainConfig& cfg);
ChainOutput run_chain(TimeSeriesDataset& data, const ChainConfig& cfg);

// ---------------------------------------------------------------------------
// Prior simulation (exact, by partition enumeration; small n only).
// ---------------------------------------------------------------------------

AlphaState sample_alpha_prior(int n, int K, const SmrpmConfig& cfg, Rng& rng);

// Draws (C, gamma) from the smRPM prior given alpha, then refreshes the
// Polya-Gamma block of `alpha` when d_gamma > 0 (it is conditionally
// independent of everything given C and the coefficients).
void sample_smrpm_prior(int n, int K, const SmrpmConfig& cfg, AlphaState& alpha,
                        const Eppf& eppf, Rng& rng, ClusterMatrix* clusters,
                        GammaMatrix* gamma);

FunctionalState sample_functional_prior(const ClusterMatrix& clusters,
                                        const FunctionalHyper& hyper, Rng& rng);
TimeSeriesState sample_ts_prior(const ClusterMatrix& clusters,
                                const TimeSeriesHyper& hyper, Rng& rng);

// ---------------------------------------------------------------------------
// Enumeration oracle: the exact law of (gamma, rho_1..rho_K) for instances
// small enough to tabulate, with fixed persistence probability alpha.
// ---------------------------------------------------------------------------

struct JointTable {
  int n = 0;
  int K = 0;
  struct Entry {
    GammaMatrix gamma;
    std::vector<LabelVector> partitions;
    double prob;
  };
  std::vector<Entry> entries;

  double total() const;
  // Marginal over gamma; key = concatenated canonical labels of all columns.
  std::map<std::vector<int>, double> partition_marginal() const;
};

JointTable enumerate_joint(int n, int K, int d_rho, double alpha_fixed,
                           const Eppf& eppf);

// Prior-only Gibbs over (gamma, C): the cluster moves use the partition
// weights with the likelihood factor forced to one.  Stationary law is the
// smRPM joint; used by the oracle comparisons.
class PriorOnlyGibbs {
 public:
  PriorOnlyGibbs(int n, int K, const SmrpmConfig& cfg, double alpha_fixed);
  void sweep(Rng& rng);
  const ClusterMatrix& clusters() const { return clusters_; }
  const GammaMatrix& gamma() const { return gamma_; }

 private:
  SmrpmConfig cfg_;
  CrpEppf eppf_;
  ClusterMatrix clusters_;
  GammaMatrix gamma_;
  AlphaState alpha_;
};

// Total variation between the empirical law of partition sequences over
// `sweeps` prior-only Gibbs sweeps and the enumerated marginal.
double prior_gibbs_total_variation(int n, int K, const SmrpmConfig& cfg,
                                   double alpha_fixed, long sweeps,
                                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// Geweke joint-distribution test: marginal-conditional vs successive-
// conditional moments of a fixed statistic battery.
// ---------------------------------------------------------------------------

struct GewekeStat {
  std::string name;
  double mean_prior = 0.0;
  double mean_chain = 0.0;
  double se = 0.0;
  double z = 0.0;
};

struct GewekeOptions {
  long rounds = 100000;
  std::uint64_t seed = 1;
  bool mutate_shape = false;  // corrupt one shape parameter in the sweep
};

std::vector<GewekeStat> geweke_functional(FunctionalDataset& data,
                                          const BasisSpec& basis,
                                          const ChainConfig& cfg,
                                          const GewekeOptions& opts);
std::vector<GewekeStat> geweke_timeseries(int n, int K, const ChainConfig& cfg,
                                          const GewekeOptions& opts);

}  // namespace smrpm

#endif  // SMRPM_INFERENCE_HPP_
