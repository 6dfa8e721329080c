#include "smrpm/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace smrpm {

Eigen::MatrixXd coclustering_matrix(std::span<const LabelVector> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("coclustering_matrix: no samples");
  }
  const int n = static_cast<int>(samples.front().size());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
  for (const LabelVector& sample : samples) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        if (sample.label(i) == sample.label(j)) {
          counts(i, j) += 1.0;
          counts(j, i) = counts(i, j);
        }
      }
    }
  }
  counts.diagonal().setConstant(static_cast<double>(samples.size()));
  return counts / static_cast<double>(samples.size());
}

double binder_loss(const LabelVector& partition, const Eigen::MatrixXd& cocluster) {
  const int n = static_cast<int>(partition.size());
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double together = partition.label(i) == partition.label(j) ? 1.0 : 0.0;
      loss += std::abs(together - cocluster(i, j));
    }
  }
  return loss;
}

namespace {

// Cost of placing unit u into cluster `target` (or a new one when target is
// the current number of clusters) against all units with assigned >= 0.
double placement_cost(int u, int target, const std::vector<int>& labels,
                      const Eigen::MatrixXd& pi) {
  double cost = 0.0;
  for (int v = 0; v < static_cast<int>(labels.size()); ++v) {
    if (v == u || labels[v] < 0) continue;
    cost += (labels[v] == target) ? 1.0 - pi(u, v) : pi(u, v);
  }
  return cost;
}

// One pass of single-unit moves; returns true if anything changed.
bool local_sweep(std::vector<int>& labels, const Eigen::MatrixXd& pi) {
  const int n = static_cast<int>(labels.size());
  bool moved = false;
  for (int u = 0; u < n; ++u) {
    int num_clusters = *std::max_element(labels.begin(), labels.end()) + 1;
    int best = labels[u];
    double best_cost = placement_cost(u, labels[u], labels, pi);
    for (int c = 0; c <= num_clusters; ++c) {
      if (c == labels[u]) continue;
      const double cost = placement_cost(u, c, labels, pi);
      if (cost < best_cost - 1e-12) {
        best_cost = cost;
        best = c;
      }
    }
    if (best != labels[u]) {
      labels[u] = best;
      // compact labels so the "new cluster" index stays meaningful
      const LabelVector canon = LabelVector::from_labels(labels);
      labels = canon.labels();
      moved = true;
    }
  }
  return moved;
}

LabelVector polish(std::vector<int> labels, const Eigen::MatrixXd& pi) {
  labels = LabelVector::from_labels(labels).labels();
  int guard = 0;
  while (local_sweep(labels, pi) && ++guard < 100) {
  }
  return LabelVector::from_labels(labels);
}

bool better(double loss_a, const LabelVector& a, double loss_b,
            const LabelVector& b) {
  if (loss_a != loss_b) return loss_a < loss_b;
  if (a.num_clusters() != b.num_clusters()) {
    return a.num_clusters() < b.num_clusters();
  }
  return a.labels() < b.labels();
}

}  // namespace

LabelVector binder_point_estimate(const Eigen::MatrixXd& cocluster, int restarts,
                                  Rng& rng, std::span<const LabelVector> seeds) {
  const int n = static_cast<int>(cocluster.rows());
  if (n <= 0) throw std::invalid_argument("binder_point_estimate: empty matrix");

  LabelVector best;
  double best_loss = std::numeric_limits<double>::infinity();
  auto consider = [&](const LabelVector& cand) {
    const double loss = binder_loss(cand, cocluster);
    if (best.size() == 0 || better(loss, cand, best_loss, best)) {
      best = cand;
      best_loss = loss;
    }
  };

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    std::vector<int> labels(n, -1);
    int num_clusters = 0;
    for (int u : order) {
      int pick = 0;
      double pick_cost = std::numeric_limits<double>::infinity();
      for (int c = 0; c <= num_clusters; ++c) {
        const double cost = placement_cost(u, c, labels, cocluster);
        if (cost < pick_cost - 1e-12) {
          pick_cost = cost;
          pick = c;
        }
      }
      labels[u] = pick;
      num_clusters = std::max(num_clusters, pick + 1);
    }
    consider(polish(std::move(labels), cocluster));
  }
  for (const LabelVector& seed : seeds) {
    consider(polish(seed.labels(), cocluster));
  }
  return best;
}

double ari(const LabelVector& p, const LabelVector& q) {
  if (p.size() != q.size()) throw std::invalid_argument("ari: length mismatch");
  const int n = static_cast<int>(p.size());
  const int rows = p.num_clusters();
  const int cols = q.num_clusters();
  Eigen::MatrixXi table = Eigen::MatrixXi::Zero(rows, cols);
  for (int i = 0; i < n; ++i) table(p.label(i), q.label(i)) += 1;

  auto choose2 = [](double m) { return 0.5 * m * (m - 1.0); };
  double pairs_both = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) pairs_both += choose2(table(r, c));
  }
  double pairs_p = 0.0, pairs_q = 0.0;
  for (int r = 0; r < rows; ++r) pairs_p += choose2(table.row(r).sum());
  for (int c = 0; c < cols; ++c) pairs_q += choose2(table.col(c).sum());
  const double expected = pairs_p * pairs_q / choose2(static_cast<double>(n));
  const double maximum = 0.5 * (pairs_p + pairs_q);
  if (maximum - expected == 0.0) return 1.0;  // both partitions trivial
  return (pairs_both - expected) / (maximum - expected);
}

double posterior_ari(const LabelVector& truth,
                     std::span<const LabelVector> samples) {
  if (samples.empty()) throw std::invalid_argument("posterior_ari: no samples");
  double total = 0.0;
  for (const LabelVector& sample : samples) total += ari(truth, sample);
  return total / static_cast<double>(samples.size());
}

LabelVector functional_partition_at(const ClusterMatrix& clusters,
                                    const BasisSpec& basis, double x) {
  const int mu = basis.find_span(x);
  const int d = basis.degree();
  const int n = clusters.n();
  // Units agreeing on all bases mu-d .. mu are locally identical on the span.
  std::vector<int> raw(n, 0);
  std::vector<int> key(d + 1);
  std::vector<std::vector<int>> seen;
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r <= d; ++r) key[r] = clusters.label(i, mu - d + r);
    auto it = std::find(seen.begin(), seen.end(), key);
    if (it == seen.end()) {
      seen.push_back(key);
      raw[i] = static_cast<int>(seen.size()) - 1;
    } else {
      raw[i] = static_cast<int>(it - seen.begin());
    }
  }
  return LabelVector::from_labels(raw);
}

double fari(const ClusterMatrix& truth, std::span<const ClusterMatrix> samples,
            const BasisSpec& basis, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("fari: empty grid");
  if (samples.empty()) throw std::invalid_argument("fari: no samples");
  // The pointwise partitions are constant within each knot span, so evaluate
  // once per span and weight by the number of grid points it contains.
  std::vector<int> span_count(basis.num_spans(), 0);
  std::vector<double> span_point(basis.num_spans(), 0.0);
  for (double x : grid) {
    const int s = basis.span_of(x);
    span_count[s] += 1;
    span_point[s] = x;
  }
  double total = 0.0;
  for (const ClusterMatrix& sample : samples) {
    for (int s = 0; s < basis.num_spans(); ++s) {
      if (span_count[s] == 0) continue;
      const double x = span_point[s];
      total += span_count[s] * ari(functional_partition_at(truth, basis, x),
                                   functional_partition_at(sample, basis, x));
    }
  }
  return total / (static_cast<double>(grid.size()) * samples.size());
}

double rmse(const FunctionalContext& ctx,
            std::span<const ClusterMatrix> partition_samples,
            std::span<const FunctionalState> state_samples) {
  if (partition_samples.size() != state_samples.size() || state_samples.empty()) {
    throw std::invalid_argument("rmse: mismatched or empty sample spans");
  }
  long points = 0;
  for (int i = 0; i < ctx.n(); ++i) points += ctx.num_points(i);
  double total = 0.0;
  for (std::size_t b = 0; b < state_samples.size(); ++b) {
    double sq = 0.0;
    for (int i = 0; i < ctx.n(); ++i) {
      for (int m = 0; m < ctx.num_points(i); ++m) {
        const double r = ctx.y(i, m) - fn_fitted_value(ctx, partition_samples[b],
                                                       state_samples[b], i, m);
        sq += r * r;
      }
    }
    total += std::sqrt(sq / static_cast<double>(points));
  }
  return total / static_cast<double>(state_samples.size());
}

Eigen::MatrixXd cluster_count_posterior(std::span<const ClusterMatrix> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("cluster_count_posterior: no samples");
  }
  const int K = samples.front().K();
  const int n = samples.front().n();
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(K, n);
  for (const ClusterMatrix& sample : samples) {
    for (int k = 0; k < K; ++k) {
      table(k, sample.column(k).num_clusters() - 1) += 1.0;
    }
  }
  return table / static_cast<double>(samples.size());
}

ConditionalEstimate conditional_theta_estimate(
    const std::vector<LabelVector>& point_partitions, FunctionalDataset& data,
    const BasisSpec& basis, const ChainConfig& cfg) {
  Rng rng(mix_seed(cfg.seed, 7));
  FunctionalGibbs sampler(data, basis, cfg, rng);

  ClusterMatrix clusters(data.n(), basis.num_basis());
  for (int k = 0; k < basis.num_basis(); ++k) {
    clusters.set_column(k, point_partitions[k]);
  }
  GammaMatrix gamma(data.n(), basis.num_basis());  // all free; frozen anyway
  FunctionalState state = sample_functional_prior(clusters, cfg.fn_hyper, rng);
  AlphaState alpha = sample_alpha_prior(data.n(), basis.num_basis(), cfg.smrpm, rng);
  sampler.set_state(std::move(clusters), std::move(gamma), std::move(state),
                    std::move(alpha));
  sampler.freeze_partitions(true);

  ConditionalEstimate estimate;
  estimate.theta_star.resize(basis.num_basis());
  for (int k = 0; k < basis.num_basis(); ++k) {
    estimate.theta_star[k].assign(point_partitions[k].num_clusters(), 0.0);
  }
  long kept = 0;
  for (int iter = 1; iter <= cfg.total_iters; ++iter) {
    sampler.sweep(rng);
    if (iter <= cfg.burn_in || (iter - cfg.burn_in) % cfg.thin != 0) continue;
    ++kept;
    const FunctionalState& s = sampler.state();
    estimate.sigma2 += s.sigma2;
    estimate.tau2 += s.tau2;
    estimate.phi += s.phi;
    for (std::size_t k = 0; k < s.theta_star.size(); ++k) {
      for (std::size_t j = 0; j < s.theta_star[k].size(); ++j) {
        estimate.theta_star[k][j] += s.theta_star[k][j];
      }
    }
  }
  if (kept == 0) {
    throw std::invalid_argument("conditional_theta_estimate: no retained draws");
  }
  estimate.sigma2 /= kept;
  estimate.tau2 /= kept;
  estimate.phi /= kept;
  for (auto& column : estimate.theta_star) {
    for (double& value : column) value /= kept;
  }
  return estimate;
}

}  // namespace smrpm
