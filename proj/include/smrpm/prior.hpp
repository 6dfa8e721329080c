#ifndef SMRPM_PRIOR_HPP_
#define SMRPM_PRIOR_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "smrpm/partition.hpp"
#include "smrpm/rng.hpp"

namespace smrpm {

// Binary persistence indicators gamma_{ik}.  gamma(i, k) = 1 freezes unit i's
// cluster for the d_rho index transitions following k-1.  Column 0 is pinned
// to zero and indices k < 0 read as zero, matching the convention that
// non-existent auxiliaries never block reallocation.
class GammaMatrix {
 public:
  GammaMatrix() = default;
  GammaMatrix(int n, int K);

  int n() const { return n_; }
  int K() const { return K_; }

  int at(int i, int k) const {
    if (k <= 0) return 0;
    return values_[static_cast<std::size_t>(k) * n_ + i];
  }

  void set(int i, int k, int value);

  bool operator==(const GammaMatrix&) const = default;

 private:
  int n_ = 0;
  int K_ = 0;
  std::vector<std::uint8_t> values_;  // column-major n x K
};

// Orders, concentration and alpha hyperparameters of the
// smRPM_{d_rho,d_gamma}(alpha, M) prior.
struct SmrpmConfig {
  int d_rho = 1;
  int d_gamma = 0;
  double crp_mass = 1.0;

  // d_gamma == 0: independent Bernoulli persistence with Beta(a, b) prior on
  // each alpha_k.
  double a_alpha = 1.0;
  double b_alpha = 1.0;

  // d_gamma > 0: logistic autoregression with N(mean, cov) prior on the
  // 2-vector of coefficients.
  Eigen::Vector2d alpha_prior_mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d alpha_prior_cov = Eigen::Matrix2d::Identity();

  void validate() const;
};

// Current state of the persistence-probability block.  Which half is live
// depends on d_gamma; omega are the Polya-Gamma augmentation variables.
struct AlphaState {
  std::vector<double> alpha_k;       // d_gamma == 0, one entry per column
  Eigen::Vector2d alpha = Eigen::Vector2d::Zero();  // d_gamma > 0
  Eigen::MatrixXd omega;             // d_gamma > 0, n x K, strictly positive
};

// R_k: units whose cluster is frozen in the transition k-1 -> k, i.e. those
// with a 1 anywhere in the gamma window of width d_rho ending at k.
std::vector<int> fixed_set(const GammaMatrix& gamma, int k, int d_rho);
bool in_fixed_set(const GammaMatrix& gamma, int i, int k, int d_rho);

// The pair (R_{k'}^{(+i,k)}, R_{k'}^{(-i,k)}): R_{k'} recomputed with
// gamma_{ik} overwritten by 1 and by 0.  Requires k <= k' <= k + d_rho - 1,
// the window in which gamma_{ik} can matter.
struct FlipSets {
  std::vector<int> plus;
  std::vector<int> minus;
  bool differ_by_i = false;  // plus == minus + {i}
};
FlipSets flip_sets(const GammaMatrix& gamma, int i, int k, int k_prime, int d_rho);

// P(gamma_{ik} = 1 | -): the persistence-indicator full conditional.  Exact
// zero when freezing unit i would break compatibility somewhere in its
// influence window; does not read the current gamma_{ik}.
double gamma_full_conditional(int i, int k, const GammaMatrix& gamma,
                              const ClusterMatrix& clusters,
                              const AlphaState& alpha, const SmrpmConfig& cfg,
                              const Eppf& eppf);

// Partition-side weights for reallocating unit i at index k: cluster sizes
// with i removed for existing clusters, the concentration mass for a new
// one, each multiplied by the backward/forward compatibility indicators.
// The model likelihood factor is multiplied in by the caller.  Requires
// i not in R_k.
struct ClusterPriorWeights {
  std::vector<double> weight;   // aligned with label; last entry = new cluster
  std::vector<int> label;       // existing cluster labels, then -1 for "new"
  std::vector<bool> feasible;   // indicator product per candidate
};
ClusterPriorWeights cluster_prior_weights(int i, int k,
                                          const ClusterMatrix& clusters,
                                          const GammaMatrix& gamma,
                                          const SmrpmConfig& cfg,
                                          const Eppf& eppf);

// Exact draw from the Polya-Gamma PG(1, c) law via the alternating-series
// rejection sampler (Polson-Scott-Windle); symmetric in the sign of c.
double sample_pg(double c, Rng& rng);

// Analytic PG(1, c) moments, used as test oracles.
double pg_mean(double c);
double pg_variance(double c);

// Beta full conditional for alpha_k when d_gamma = 0.
double update_alpha_beta(const GammaMatrix& gamma, int k, double a_alpha,
                         double b_alpha, Rng& rng);

// Logistic design row z_ik = (1, sum of the previous d_gamma gammas).
Eigen::Vector2d logistic_design_row(const GammaMatrix& gamma, int i, int k,
                                    int d_gamma);

// Joint update of the logistic coefficients and the Polya-Gamma variables
// when d_gamma > 0.  Draws alpha from its Gaussian full conditional over the
// stochastic columns k >= 1, then refreshes every omega_{ik}.  Throws if the
// posterior precision is numerically indefinite.
void update_alpha_logistic(const GammaMatrix& gamma, const SmrpmConfig& cfg,
                           AlphaState& state, Rng& rng);

}  // namespace smrpm

#endif  // SMRPM_PRIOR_HPP_
