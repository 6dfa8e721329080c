#ifndef SMRPM_PARTITION_HPP_
#define SMRPM_PARTITION_HPP_

#include <memory>
#include <span>
#include <vector>

namespace smrpm {

// A partition of n units stored as a canonical label vector: unit 0 carries
// label 0 and every later unit either reuses an earlier label or introduces
// the smallest unused one.  Canonical form makes set-partition equality plain
// vector equality, which keeps the comparisons in the sampler's hot loop O(n).
class LabelVector {
 public:
  LabelVector() = default;

  // Canonicalizes arbitrary labels (any integers, any order).
  static LabelVector from_labels(std::span<const int> raw);

  // Accepts labels already in canonical form; throws otherwise.
  static LabelVector from_canonical(std::vector<int> labels);

  const std::vector<int>& labels() const { return labels_; }
  int label(std::size_t i) const { return labels_[i]; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  int num_clusters() const { return num_clusters_; }
  std::vector<int> cluster_sizes() const;

  // Induced partition on the given unit indices, re-canonicalized.  The
  // empty subset yields the empty partition.  Throws std::out_of_range on a
  // bad index.
  LabelVector reduce(std::span<const int> subset) const;

  bool operator==(const LabelVector&) const = default;
  auto operator<=>(const LabelVector&) const = default;

 private:
  std::vector<int> labels_;
  int num_clusters_ = 0;
};

// Whether two partitions of the same n units agree once restricted to the
// fixed units (Definition 1 style compatibility).  Throws on length mismatch.
bool compatible(const LabelVector& p_prev, const LabelVector& p_curr,
                std::span<const int> fixed);

// Exchangeable partition probability function: the prior on a single
// partition.  The CRP is the only implementation shipped, but the samplers
// only ever touch this interface, so Gibbs-type alternatives slot in.
class Eppf {
 public:
  virtual ~Eppf() = default;

  // log P(p) including the normalizer, so probabilities over all set
  // partitions of n units sum to one.
  virtual double log_eppf(const LabelVector& p) const = 0;

  // Allocation probabilities for one additional unit given a partition of m
  // units: entry j < J is the probability of joining cluster j, entry J of
  // opening a new cluster.  Entries sum to one.
  virtual std::vector<double> predictive(const LabelVector& reduced) const = 0;
};

class CrpEppf final : public Eppf {
 public:
  explicit CrpEppf(double mass);
  double mass() const { return mass_; }
  double log_eppf(const LabelVector& p) const override;
  std::vector<double> predictive(const LabelVector& reduced) const override;

 private:
  double mass_;
};

// Free-function forms used throughout the tests.
double crp_log_eppf(const LabelVector& p, double mass);
std::vector<double> crp_predictive(const LabelVector& reduced, double mass);

// All set partitions of n units in canonical form (restricted growth order).
// Intended for the enumeration oracles; n is capped at 12.
std::vector<LabelVector> all_partitions(int n);

// The sequence of local partitions rho_1..rho_K stored column-wise: column k
// is the canonical partition at domain index k, entry (i, k) the local
// cluster label c_ik.
class ClusterMatrix {
 public:
  ClusterMatrix() = default;
  ClusterMatrix(int n, int K);  // every column one single cluster

  int n() const { return n_; }
  int K() const { return K_; }

  const LabelVector& column(int k) const { return columns_[k]; }
  int label(int i, int k) const { return columns_[k].label(i); }

  void set_column(int k, LabelVector column);

  bool operator==(const ClusterMatrix&) const = default;

 private:
  int n_ = 0;
  int K_ = 0;
  std::vector<LabelVector> columns_;
};

}  // namespace smrpm

#endif  // SMRPM_PARTITION_HPP_
