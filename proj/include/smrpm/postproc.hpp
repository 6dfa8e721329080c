#ifndef SMRPM_POSTPROC_HPP_
#define SMRPM_POSTPROC_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "smrpm/bspline.hpp"
#include "smrpm/inference.hpp"
#include "smrpm/models.hpp"
#include "smrpm/partition.hpp"
#include "smrpm/rng.hpp"

namespace smrpm {

// Pairwise co-clustering frequencies over posterior samples of one
// partition: entry (i, i') is the fraction of samples allocating i and i'
// together.  Symmetric with unit diagonal.
Eigen::MatrixXd coclustering_matrix(std::span<const LabelVector> samples);

// Equal-cost Binder loss sum_{i<i'} |1[c_i = c_i'] - pi_ii'|.
double binder_loss(const LabelVector& partition, const Eigen::MatrixXd& cocluster);

// SALSO-style stochastic search for the Binder point estimate: greedy
// sequential allocation in random unit orders followed by single-unit
// reallocation sweeps, best of `restarts` starts plus any provided seed
// partitions (posterior samples, typically).  Ties prefer fewer clusters,
// then lexicographically smallest canonical labels.
LabelVector binder_point_estimate(const Eigen::MatrixXd& cocluster, int restarts,
                                  Rng& rng,
                                  std::span<const LabelVector> seeds = {});

// Adjusted Rand index (permutation-model expectation).  Degenerate
// denominators (both partitions trivial) return 1.
double ari(const LabelVector& p, const LabelVector& q);

// Mean ARI between the truth and each stored sample.
double posterior_ari(const LabelVector& truth, std::span<const LabelVector> samples);

// Pointwise functional partition: two curves share a cluster at x iff their
// labels agree on all d+1 bases supporting the knot span containing x.
LabelVector functional_partition_at(const ClusterMatrix& clusters,
                                    const BasisSpec& basis, double x);

// Functional ARI: ARI of the pointwise partitions, averaged over the grid
// and the samples.
double fari(const ClusterMatrix& truth, std::span<const ClusterMatrix> samples,
            const BasisSpec& basis, std::span<const double> grid);

// Posterior mean of the per-sample root mean squared prediction error.
double rmse(const FunctionalContext& ctx,
            std::span<const ClusterMatrix> partition_samples,
            std::span<const FunctionalState> state_samples);

// Row k holds the empirical distribution of the number of clusters J_k over
// the samples; columns are counts 1..n.
Eigen::MatrixXd cluster_count_posterior(std::span<const ClusterMatrix> samples);

// Parameter estimates conditional on the partition point estimates: the
// sampler is re-run with every c_ik frozen, so only the conjugate blocks
// move, and posterior means are returned.
struct ConditionalEstimate {
  std::vector<std::vector<double>> theta_star;  // posterior means, [K][J_k]
  double sigma2 = 0.0;
  double tau2 = 0.0;
  double phi = 0.0;
};
ConditionalEstimate conditional_theta_estimate(
    const std::vector<LabelVector>& point_partitions, FunctionalDataset& data,
    const BasisSpec& basis, const ChainConfig& cfg);

}  // namespace smrpm

#endif  // SMRPM_POSTPROC_HPP_
