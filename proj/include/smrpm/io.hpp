#ifndef SMRPM_IO_HPP_
#define SMRPM_IO_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smrpm/inference.hpp"
#include "smrpm/models.hpp"
#include "smrpm/partition.hpp"

namespace smrpm {

// Long-format functional data: header `series_id,x,y`, one curve per distinct
// series id, points sorted by x.  Duplicate (series, x) pairs are rejected;
// malformed rows raise with the line number.
FunctionalDataset load_functional_csv(const std::string& path);

// Long-format series data: header `series_id,k,y` with 1-based integer k.
// Every series must cover the same index range.
TimeSeriesDataset load_ts_csv(const std::string& path);

// Truth files `series_id,k,label`; rows must cover every (series, k) pair of
// `ids` x {1..K}.  Labels are re-canonicalized per column.
ClusterMatrix load_truth_csv(const std::string& path,
                             std::span<const std::string> ids, int K);

// Registration: x <- x - shift per series; unknown ids in the map are an
// error, series without an entry shift by zero.
void register_shift(FunctionalDataset& data,
                    const std::map<std::string, double>& shifts);

// Default basis size: max number of observed points per curve divided by
// three (rounded up), floored at degree + 1.
int default_knot_count(const FunctionalDataset& data, int degree);

// Flat key = value run configuration (# comments and blank lines ignored).
struct RunConfig {
  ModelKind model = ModelKind::kFunctional;
  std::string data_path;
  std::string truth_path;
  std::string out_dir = "out";
  ChainConfig chain;
  int chains = 1;
  int degree = 3;
  std::optional<int> num_basis;
  std::map<std::string, double> shifts;
  std::optional<int> grid_points;  // curves_grid resolution
  bool svg = false;

  // The parsed keys re-serialized in sorted order; its hash goes into the
  // manifest.
  std::string canonical_text;
  std::uint64_t config_hash() const;
};
RunConfig load_run_config(const std::string& path);

// --- emitted files -------------------------------------------------------

void write_partition_samples_csv(const std::string& path,
                                 std::span<const ClusterMatrix> samples);
std::vector<ClusterMatrix> load_partition_samples_csv(const std::string& path);

void write_fn_params_csv(const std::string& path,
                         std::span<const FunctionalState> states,
                         std::span<const AlphaState> alphas);
void write_ts_params_csv(const std::string& path,
                         std::span<const TimeSeriesState> states,
                         std::span<const AlphaState> alphas);
std::vector<FunctionalState> load_fn_params_csv(const std::string& path);

void write_point_partitions_csv(const std::string& path,
                                std::span<const LabelVector> points);
std::vector<LabelVector> load_point_partitions_csv(const std::string& path);

void write_jk_posterior_csv(const std::string& path, const Eigen::MatrixXd& table);
void write_curves_grid_csv(const std::string& path,
                           std::span<const std::string> ids,
                           std::span<const double> grid,
                           const std::vector<std::vector<double>>& fitted);
void write_metrics_csv(const std::string& path,
                       const std::vector<std::tuple<std::string, int, double>>& rows);

void write_manifest(const std::string& path, const RunConfig& cfg,
                    const std::map<std::string, std::string>& extra);

// Minimal SVG polyline rendering of the fitted curves (best effort; the CSV
// files are the contract).
void write_curves_svg(const std::string& path, std::span<const double> grid,
                      const std::vector<std::vector<double>>& fitted,
                      const std::vector<int>& color_group);

}  // namespace smrpm

#endif  // SMRPM_IO_HPP_
