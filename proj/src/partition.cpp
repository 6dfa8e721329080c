#include "smrpm/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace smrpm {

LabelVector LabelVector::from_labels(std::span<const int> raw) {
  LabelVector out;
  out.labels_.reserve(raw.size());
  std::unordered_map<int, int> remap;
  for (int value : raw) {
    auto [it, inserted] = remap.try_emplace(value, static_cast<int>(remap.size()));
    out.labels_.push_back(it->second);
  }
  out.num_clusters_ = static_cast<int>(remap.size());
  return out;
}

LabelVector LabelVector::from_canonical(std::vector<int> labels) {
  int next = 0;
  for (int value : labels) {
    if (value < 0 || value > next) {
      throw std::invalid_argument("LabelVector: labels not in canonical form");
    }
    if (value == next) ++next;
  }
  LabelVector out;
  out.labels_ = std::move(labels);
  out.num_clusters_ = next;
  return out;
}

std::vector<int> LabelVector::cluster_sizes() const {
  std::vector<int> sizes(num_clusters_, 0);
  for (int value : labels_) ++sizes[value];
  return sizes;
}

LabelVector LabelVector::reduce(std::span<const int> subset) const {
  std::vector<int> raw;
  raw.reserve(subset.size());
  for (int i : subset) {
    if (i < 0 || static_cast<std::size_t>(i) >= labels_.size()) {
      throw std::out_of_range("reduce: unit index out of range");
    }
    raw.push_back(labels_[i]);
  }
  return from_labels(raw);
}

bool compatible(const LabelVector& p_prev, const LabelVector& p_curr,
                std::span<const int> fixed) {
  if (p_prev.size() != p_curr.size()) {
    throw std::invalid_argument("compatible: partitions of different lengths");
  }
  return p_prev.reduce(fixed) == p_curr.reduce(fixed);
}

CrpEppf::CrpEppf(double mass) : mass_(mass) {
  if (!(mass > 0.0)) throw std::invalid_argument("CrpEppf: mass must be positive");
}

double CrpEppf::log_eppf(const LabelVector& p) const {
  // log [ M^J prod_j Gamma(n_j) * Gamma(M) / Gamma(M + n) ]
  const int n = static_cast<int>(p.size());
  double log_p = std::lgamma(mass_) - std::lgamma(mass_ + n);
  for (int size : p.cluster_sizes()) {
    log_p += std::log(mass_) + std::lgamma(static_cast<double>(size));
  }
  return log_p;
}

std::vector<double> CrpEppf::predictive(const LabelVector& reduced) const {
  const double m = static_cast<double>(reduced.size());
  std::vector<double> probs;
  probs.reserve(reduced.num_clusters() + 1);
  for (int size : reduced.cluster_sizes()) {
    probs.push_back(size / (m + mass_));
  }
  probs.push_back(mass_ / (m + mass_));
  return probs;
}

double crp_log_eppf(const LabelVector& p, double mass) {
  return CrpEppf(mass).log_eppf(p);
}

std::vector<double> crp_predictive(const LabelVector& reduced, double mass) {
  return CrpEppf(mass).predictive(reduced);
}

std::vector<LabelVector> all_partitions(int n) {
  if (n < 0 || n > 12) {
    throw std::invalid_argument("all_partitions: n must be in [0, 12]");
  }
  std::vector<LabelVector> out;
  if (n == 0) {
    out.push_back(LabelVector());
    return out;
  }
  // Restricted growth strings: labels[0] = 0, labels[i] <= 1 + max(previous).
  std::vector<int> labels(n, 0);
  auto recurse = [&](auto&& self, int i, int max_used) -> void {
    if (i == n) {
      out.push_back(LabelVector::from_canonical(labels));
      return;
    }
    for (int lab = 0; lab <= max_used + 1; ++lab) {
      labels[i] = lab;
      self(self, i + 1, std::max(max_used, lab));
    }
  };
  recurse(recurse, 1, 0);
  return out;
}

ClusterMatrix::ClusterMatrix(int n, int K) : n_(n), K_(K) {
  if (n <= 0 || K <= 0) {
    throw std::invalid_argument("ClusterMatrix: dimensions must be positive");
  }
  columns_.assign(K, LabelVector::from_canonical(std::vector<int>(n, 0)));
}

void ClusterMatrix::set_column(int k, LabelVector column) {
  if (k < 0 || k >= K_) throw std::out_of_range("set_column: column index");
  if (static_cast<int>(column.size()) != n_) {
    throw std::invalid_argument("set_column: wrong length");
  }
  columns_[k] = std::move(column);
}

}  // namespace smrpm
