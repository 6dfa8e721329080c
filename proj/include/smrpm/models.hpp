#ifndef SMRPM_MODELS_HPP_
#define SMRPM_MODELS_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smrpm/bspline.hpp"
#include "smrpm/partition.hpp"
#include "smrpm/rng.hpp"

namespace smrpm {

// ---------------------------------------------------------------------------
// Functional model: curves observed with Gaussian noise around a B-spline
// expansion whose coefficients are shared within local clusters, and an
// autoregressive prior linking cluster coefficients across adjacent bases.
// ---------------------------------------------------------------------------

struct FunctionalCurve {
  std::string id;
  std::vector<double> x;  // sorted evaluation points
  std::vector<double> y;
};

struct FunctionalDataset {
  std::vector<FunctionalCurve> curves;

  int n() const { return static_cast<int>(curves.size()); }
  int max_points() const;
  double x_min() const;
  double x_max() const;
  // Checks sorted points and matching lengths; throws on violation.
  void validate() const;
};

struct FunctionalHyper {
  double m0 = 0.0;
  double s0_2 = 1.0;
  double a_tau = 1.0;
  double b_tau = 1.0;
  double a_sigma = 1.0;
  double b_sigma = 1.0;
};

struct FunctionalState {
  std::vector<std::vector<double>> theta_star;  // [K][J_k]
  double sigma2 = 1.0;
  double tau2 = 1.0;
  double phi = 0.0;
  FunctionalHyper hyper;
};

// Immutable per-fit cache: design matrices and the contiguous row range on
// which each basis function is nonzero.  Everything downstream reads basis
// values from here.
class FunctionalContext {
 public:
  FunctionalContext(const FunctionalDataset& data, const BasisSpec& basis);

  const FunctionalDataset& data() const { return *data_; }
  const BasisSpec& basis() const { return *basis_; }
  int n() const { return static_cast<int>(designs_.size()); }
  int num_basis() const { return basis_->num_basis(); }
  int num_points(int i) const { return static_cast<int>(designs_[i].rows()); }
  const Eigen::MatrixXd& design(int i) const { return designs_[i]; }
  double y(int i, int m) const { return data_->curves[i].y[m]; }

  // Rows [first, last) of curve i's design with a nonzero entry in column k.
  std::pair<int, int> support(int i, int k) const {
    return supports_[i][k];
  }

 private:
  const FunctionalDataset* data_;
  const BasisSpec* basis_;
  std::vector<Eigen::MatrixXd> designs_;
  std::vector<std::vector<std::pair<int, int>>> supports_;
};

// Fitted value b(x_im)' theta_i under the current state.
double fn_fitted_value(const FunctionalContext& ctx, const ClusterMatrix& clusters,
                       const FunctionalState& state, int i, int m);

// Log-likelihood of curve i with its label at basis k set to j.  For the
// new-cluster case (j == J_k) the auxiliary coefficient must be supplied;
// passing it for an existing cluster is a contract error.
double fn_loglik_curve_at_label(int i, int k, int j, const FunctionalContext& ctx,
                                const ClusterMatrix& clusters,
                                const FunctionalState& state,
                                const double* aux_theta = nullptr);

// Full-conditional draws.  Each returns the sampled value and writes it into
// the state.
double fn_update_theta_star(int k, int j, const FunctionalContext& ctx,
                            const ClusterMatrix& clusters, FunctionalState& state,
                            Rng& rng);
double fn_update_sigma2(const FunctionalContext& ctx, const ClusterMatrix& clusters,
                        FunctionalState& state, Rng& rng);
double fn_update_tau2(const ClusterMatrix& clusters, FunctionalState& state,
                      Rng& rng);
double fn_update_phi(const ClusterMatrix& clusters, FunctionalState& state,
                     Rng& rng);

// Total data log-likelihood under the current state.
double fn_data_loglik(const FunctionalContext& ctx, const ClusterMatrix& clusters,
                      const FunctionalState& state);

// Cluster-flow bookkeeping between adjacent columns.  backward_sets(prev,
// curr)[j] lists the clusters of `prev` that are reallocated into cluster j
// of `curr` at least once; forward_sets(curr, next)[j] lists the clusters of
// `next` that receive cluster j of `curr`.
std::vector<std::vector<int>> backward_sets(const LabelVector& prev,
                                            const LabelVector& curr);
std::vector<std::vector<int>> forward_sets(const LabelVector& curr,
                                           const LabelVector& next);

// Mean of theta_prev over a parent set (empty set is a contract error).
double parent_mean(const std::vector<int>& parents,
                   const std::vector<double>& theta_prev);

// ---------------------------------------------------------------------------
// Time-series model: one observation per unit and index, cluster-specific
// means and variances with a per-index Gaussian/inverse-gamma hierarchy.
// ---------------------------------------------------------------------------

struct TimeSeriesDataset {
  std::vector<std::string> ids;
  Eigen::MatrixXd y;  // n x K

  int n() const { return static_cast<int>(y.rows()); }
  int K() const { return static_cast<int>(y.cols()); }
};

struct TimeSeriesHyper {
  double m0 = 0.0;
  double s0_2 = 1.0;
  double a_lambda = 1.0;
  double b_lambda = 1.0;
  double a_tau = 1.0;
  double b_tau = 1.0;
  double a_sigma = 1.0;
  double b_sigma = 1.0;
};

struct TimeSeriesState {
  std::vector<std::vector<double>> mu_star;      // [K][J_k]
  std::vector<std::vector<double>> sigma2_star;  // [K][J_k]
  std::vector<double> theta;  // per index
  std::vector<double> tau2;   // per index
  double phi0 = 0.0;
  double lambda2 = 1.0;
  TimeSeriesHyper hyper;
};

double ts_loglik(double y, double mu, double sigma2);

// One pass over all conjugate blocks in the order phi0, lambda2,
// {theta_k, tau2_k}, {mu*_kj, sigma2*_kj}.
void ts_update_params(const TimeSeriesDataset& data, const ClusterMatrix& clusters,
                      TimeSeriesState& state, Rng& rng);

double ts_data_loglik(const TimeSeriesDataset& data, const ClusterMatrix& clusters,
                      const TimeSeriesState& state);

}  // namespace smrpm

#endif  // SMRPM_MODELS_HPP_
