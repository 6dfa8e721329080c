#include "smrpm/io.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace smrpm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& text, const std::string& path, long line) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing junk");
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ":" + std::to_string(line) +
                             ": cannot parse '" + text + "' as a number");
  }
}

long parse_int(const std::string& text, const std::string& path, long line) {
  try {
    std::size_t used = 0;
    const long value = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing junk");
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ":" + std::to_string(line) +
                             ": cannot parse '" + text + "' as an integer");
  }
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return in;
}

std::ofstream create_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot create file: " + path);
  out.precision(17);
  return out;
}

void expect_header(const std::string& got, const std::string& want,
                   const std::string& path) {
  if (got != want) {
    throw std::runtime_error(path + ": expected header '" + want + "', got '" +
                             got + "'");
  }
}

}  // namespace

FunctionalDataset load_functional_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  long line_no = 0;
  std::getline(in, line);
  ++line_no;
  expect_header(line, "series_id,x,y", path);

  std::map<std::string, std::vector<std::pair<double, double>>> rows;
  std::vector<std::string> order;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 3 fields");
    }
    const double x = parse_double(fields[1], path, line_no);
    const double y = parse_double(fields[2], path, line_no);
    auto [it, inserted] = rows.try_emplace(fields[0]);
    if (inserted) order.push_back(fields[0]);
    it->second.emplace_back(x, y);
  }

  FunctionalDataset data;
  for (const std::string& id : order) {
    auto& points = rows[id];
    std::sort(points.begin(), points.end());
    for (std::size_t m = 1; m < points.size(); ++m) {
      if (points[m].first == points[m - 1].first) {
        throw std::runtime_error(path + ": duplicate evaluation point x=" +
                                 std::to_string(points[m].first) +
                                 " for series '" + id + "'");
      }
    }
    FunctionalCurve curve;
    curve.id = id;
    for (const auto& [x, y] : points) {
      curve.x.push_back(x);
      curve.y.push_back(y);
    }
    data.curves.push_back(std::move(curve));
  }
  data.validate();
  return data;
}

TimeSeriesDataset load_ts_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  long line_no = 0;
  std::getline(in, line);
  ++line_no;
  expect_header(line, "series_id,k,y", path);

  std::map<std::string, std::map<long, double>> rows;
  std::vector<std::string> order;
  long K = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 3 fields");
    }
    const long k = parse_int(fields[1], path, line_no);
    if (k < 1) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": k must be a positive index");
    }
    const double y = parse_double(fields[2], path, line_no);
    auto [it, inserted] = rows.try_emplace(fields[0]);
    if (inserted) order.push_back(fields[0]);
    if (!it->second.emplace(k, y).second) {
      throw std::runtime_error(path + ": duplicate (series, k) row for '" +
                               fields[0] + "', k=" + std::to_string(k));
    }
    K = std::max(K, k);
  }
  if (order.empty()) throw std::runtime_error(path + ": no data rows");

  TimeSeriesDataset data;
  data.ids = order;
  data.y.resize(static_cast<long>(order.size()), K);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& series = rows[order[i]];
    if (static_cast<long>(series.size()) != K) {
      throw std::runtime_error(path + ": series '" + order[i] + "' covers " +
                               std::to_string(series.size()) + " of " +
                               std::to_string(K) + " indices");
    }
    for (const auto& [k, y] : series) data.y(static_cast<long>(i), k - 1) = y;
  }
  return data;
}

ClusterMatrix load_truth_csv(const std::string& path,
                             std::span<const std::string> ids, int K) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  long line_no = 0;
  std::getline(in, line);
  ++line_no;
  expect_header(line, "series_id,k,label", path);

  std::map<std::string, int> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = static_cast<int>(i);
  const int n = static_cast<int>(ids.size());
  std::vector<std::vector<int>> raw(K, std::vector<int>(n, INT_MIN));
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 3 fields");
    }
    const auto it = index.find(fields[0]);
    if (it == index.end()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": unknown series '" + fields[0] + "'");
    }
    const long k = parse_int(fields[1], path, line_no);
    if (k < 1 || k > K) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": index k out of range");
    }
    raw[k - 1][it->second] =
        static_cast<int>(parse_int(fields[2], path, line_no));
  }
  ClusterMatrix truth(n, K);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < n; ++i) {
      if (raw[k][i] == INT_MIN) {
        throw std::runtime_error(path + ": missing label for series '" +
                                 std::string(ids[i]) + "' at k=" +
                                 std::to_string(k + 1));
      }
    }
    truth.set_column(k, LabelVector::from_labels(raw[k]));
  }
  return truth;
}

void register_shift(FunctionalDataset& data,
                    const std::map<std::string, double>& shifts) {
  std::set<std::string> known;
  for (const auto& curve : data.curves) known.insert(curve.id);
  for (const auto& [id, shift] : shifts) {
    if (!known.count(id)) {
      throw std::invalid_argument("register_shift: unknown series '" + id + "'");
    }
    (void)shift;
  }
  for (auto& curve : data.curves) {
    const auto it = shifts.find(curve.id);
    if (it == shifts.end()) continue;
    for (double& x : curve.x) x -= it->second;
  }
}

int default_knot_count(const FunctionalDataset& data, int degree) {
  const int by_points = (data.max_points() + 2) / 3;  // ceil(max / 3)
  return std::max(by_points, degree + 1);
}

std::uint64_t RunConfig::config_hash() const {
  // FNV-1a over the canonical text.
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : canonical_text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::map<std::string, std::string> keys;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected key = value");
      }
      continue;
    }
    auto trim = [](std::string text) {
      const auto first = text.find_first_not_of(" \t\r");
      const auto last = text.find_last_not_of(" \t\r");
      return first == std::string::npos ? std::string()
                                        : text.substr(first, last - first + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": empty key");
    }
    keys[key] = value;
  }

  RunConfig cfg;
  std::set<std::string> consumed;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = keys.find(key);
    if (it == keys.end()) return std::nullopt;
    consumed.insert(key);
    return it->second;
  };
  auto take_double = [&](const std::string& key, double fallback) {
    const auto v = take(key);
    return v ? parse_double(*v, path, 0) : fallback;
  };
  auto take_int = [&](const std::string& key, long fallback) {
    const auto v = take(key);
    return v ? parse_int(*v, path, 0) : fallback;
  };

  if (const auto v = take("model")) {
    if (*v == "functional") {
      cfg.model = ModelKind::kFunctional;
    } else if (*v == "timeseries") {
      cfg.model = ModelKind::kTimeSeries;
    } else {
      throw std::runtime_error(path + ": model must be functional|timeseries");
    }
  }
  cfg.chain.model = cfg.model;
  if (const auto v = take("data")) cfg.data_path = *v;
  if (const auto v = take("truth")) cfg.truth_path = *v;
  if (const auto v = take("out")) cfg.out_dir = *v;
  cfg.chain.total_iters = static_cast<int>(take_int("iters", cfg.chain.total_iters));
  cfg.chain.burn_in = static_cast<int>(take_int("burnin", cfg.chain.burn_in));
  cfg.chain.thin = static_cast<int>(take_int("thin", cfg.chain.thin));
  cfg.chain.seed = static_cast<std::uint64_t>(take_int("seed", 1));
  cfg.chains = static_cast<int>(take_int("chains", 1));
  cfg.chain.smrpm.d_rho = static_cast<int>(take_int("d_rho", 1));
  cfg.chain.smrpm.d_gamma = static_cast<int>(take_int("d_gamma", 0));
  cfg.chain.smrpm.crp_mass = take_double("crp_mass", 1.0);
  cfg.chain.smrpm.a_alpha = take_double("a_alpha", 1.0);
  cfg.chain.smrpm.b_alpha = take_double("b_alpha", 1.0);
  cfg.chain.smrpm.alpha_prior_mean(0) = take_double("alpha_mean_0", 0.0);
  cfg.chain.smrpm.alpha_prior_mean(1) = take_double("alpha_mean_1", 0.0);
  cfg.chain.smrpm.alpha_prior_cov(0, 0) = take_double("alpha_cov_00", 1.0);
  cfg.chain.smrpm.alpha_prior_cov(0, 1) = take_double("alpha_cov_01", 0.0);
  cfg.chain.smrpm.alpha_prior_cov(1, 0) = cfg.chain.smrpm.alpha_prior_cov(0, 1);
  cfg.chain.smrpm.alpha_prior_cov(1, 1) = take_double("alpha_cov_11", 1.0);

  cfg.chain.fn_hyper.m0 = take_double("m0", 0.0);
  cfg.chain.fn_hyper.s0_2 = take_double("s0_2", 1.0);
  cfg.chain.fn_hyper.a_tau = take_double("a_tau", 1.0);
  cfg.chain.fn_hyper.b_tau = take_double("b_tau", 1.0);
  cfg.chain.fn_hyper.a_sigma = take_double("a_sigma", 1.0);
  cfg.chain.fn_hyper.b_sigma = take_double("b_sigma", 1.0);
  cfg.chain.ts_hyper.m0 = cfg.chain.fn_hyper.m0;
  cfg.chain.ts_hyper.s0_2 = cfg.chain.fn_hyper.s0_2;
  cfg.chain.ts_hyper.a_tau = cfg.chain.fn_hyper.a_tau;
  cfg.chain.ts_hyper.b_tau = cfg.chain.fn_hyper.b_tau;
  cfg.chain.ts_hyper.a_sigma = cfg.chain.fn_hyper.a_sigma;
  cfg.chain.ts_hyper.b_sigma = cfg.chain.fn_hyper.b_sigma;
  cfg.chain.ts_hyper.a_lambda = take_double("a_lambda", 1.0);
  cfg.chain.ts_hyper.b_lambda = take_double("b_lambda", 1.0);

  cfg.degree = static_cast<int>(take_int("degree", 3));
  if (const auto v = take("num_basis")) {
    cfg.num_basis = static_cast<int>(parse_int(*v, path, 0));
  }
  if (const auto v = take("grid_points")) {
    cfg.grid_points = static_cast<int>(parse_int(*v, path, 0));
  }
  if (const auto v = take("svg")) cfg.svg = (*v == "1" || *v == "true");

  for (const auto& [key, value] : keys) {
    if (consumed.count(key)) continue;
    if (key.rfind("shift.", 0) == 0) {
      cfg.shifts[key.substr(6)] = parse_double(value, path, 0);
      continue;
    }
    throw std::runtime_error(path + ": unknown configuration key '" + key + "'");
  }

  std::ostringstream canon;
  for (const auto& [key, value] : keys) canon << key << "=" << value << "\n";
  cfg.canonical_text = canon.str();
  cfg.chain.assert_level = assert_level_from_env();
  return cfg;
}

// --- emitted files ---------------------------------------------------------

void write_partition_samples_csv(const std::string& path,
                                 std::span<const ClusterMatrix> samples) {
  std::ofstream out = create_or_throw(path);
  out << "iter,i,k,label\n";
  for (std::size_t b = 0; b < samples.size(); ++b) {
    const ClusterMatrix& sample = samples[b];
    for (int k = 0; k < sample.K(); ++k) {
      for (int i = 0; i < sample.n(); ++i) {
        out << (b + 1) << ',' << (i + 1) << ',' << (k + 1) << ','
            << (sample.label(i, k) + 1) << '\n';
      }
    }
  }
}

std::vector<ClusterMatrix> load_partition_samples_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  long line_no = 0;
  std::getline(in, line);
  ++line_no;
  expect_header(line, "iter,i,k,label", path);
  std::map<long, std::map<long, std::map<long, int>>> cells;  // iter -> k -> i
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 4 fields");
    }
    cells[parse_int(fields[0], path, line_no)][parse_int(fields[2], path, line_no)]
         [parse_int(fields[1], path, line_no)] =
             static_cast<int>(parse_int(fields[3], path, line_no));
  }
  std::vector<ClusterMatrix> samples;
  for (const auto& [iter, columns] : cells) {
    const int K = static_cast<int>(columns.size());
    const int n = static_cast<int>(columns.begin()->second.size());
    ClusterMatrix sample(n, K);
    for (const auto& [k, units] : columns) {
      std::vector<int> raw(n);
      for (const auto& [i, label] : units) raw[i - 1] = label;
      sample.set_column(static_cast<int>(k - 1), LabelVector::from_labels(raw));
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

namespace {

void write_alpha_rows(std::ofstream& out, std::size_t iter,
                      const AlphaState& alpha) {
  if (!alpha.alpha_k.empty()) {
    for (std::size_t k = 0; k < alpha.alpha_k.size(); ++k) {
      out << iter << ",alpha," << (k + 1) << ",," << alpha.alpha_k[k] << '\n';
    }
  } else {
    out << iter << ",alpha0,,," << alpha.alpha(0) << '\n';
    out << iter << ",alpha1,,," << alpha.alpha(1) << '\n';
  }
}

}  // namespace

void write_fn_params_csv(const std::string& path,
                         std::span<const FunctionalState> states,
                         std::span<const AlphaState> alphas) {
  std::ofstream out = create_or_throw(path);
  out << "iter,name,k,j,value\n";
  for (std::size_t b = 0; b < states.size(); ++b) {
    const FunctionalState& state = states[b];
    for (std::size_t k = 0; k < state.theta_star.size(); ++k) {
      for (std::size_t j = 0; j < state.theta_star[k].size(); ++j) {
        out << (b + 1) << ",theta_star," << (k + 1) << ',' << (j + 1) << ','
            << state.theta_star[k][j] << '\n';
      }
    }
    out << (b + 1) << ",sigma2,,," << state.sigma2 << '\n';
    out << (b + 1) << ",tau2,,," << state.tau2 << '\n';
    out << (b + 1) << ",phi,,," << state.phi << '\n';
    if (b < alphas.size()) write_alpha_rows(out, b + 1, alphas[b]);
  }
}

void write_ts_params_csv(const std::string& path,
                         std::span<const TimeSeriesState> states,
                         std::span<const AlphaState> alphas) {
  std::ofstream out = create_or_throw(path);
  out << "iter,name,k,j,value\n";
  for (std::size_t b = 0; b < states.size(); ++b) {
    const TimeSeriesState& state = states[b];
    for (std::size_t k = 0; k < state.mu_star.size(); ++k) {
      for (std::size_t j = 0; j < state.mu_star[k].size(); ++j) {
        out << (b + 1) << ",mu_star," << (k + 1) << ',' << (j + 1) << ','
            << state.mu_star[k][j] << '\n';
        out << (b + 1) << ",sigma2_star," << (k + 1) << ',' << (j + 1) << ','
            << state.sigma2_star[k][j] << '\n';
      }
      out << (b + 1) << ",theta," << (k + 1) << ",," << state.theta[k] << '\n';
      out << (b + 1) << ",tau2," << (k + 1) << ",," << state.tau2[k] << '\n';
    }
    out << (b + 1) << ",phi0,,," << state.phi0 << '\n';
    out << (b + 1) << ",lambda2,,," << state.lambda2 << '\n';
    if (b < alphas.size()) write_alpha_rows(out, b + 1, alphas[b]);
  }
}

std::vector<FunctionalState> load_fn_params_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  long line_no = 0;
  std::getline(in, line);
  ++line_no;
  expect_header(line, "iter,name,k,j,value", path);
  std::map<long, FunctionalState> by_iter;
  std::map<long, std::map<long, std::map<long, double>>> theta;  // iter->k->j
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 5 fields");
    }
    const long iter = parse_int(fields[0], path, line_no);
    const std::string& name = fields[1];
    const double value = parse_double(fields[4], path, line_no);
    if (name == "theta_star") {
      theta[iter][parse_int(fields[2], path, line_no)]
           [parse_int(fields[3], path, line_no)] = value;
    } else if (name == "sigma2") {
      by_iter[iter].sigma2 = value;
    } else if (name == "tau2") {
      by_iter[iter].tau2 = value;
    } else if (name == "phi") {
      by_iter[iter].phi = value;
    }
  }
  std::vector<FunctionalState> states;
  for (auto& [iter, state] : by_iter) {
    const auto& columns = theta[iter];
    state.theta_star.resize(columns.empty() ? 0 : columns.rbegin()->first);
    for (const auto& [k, entries] : columns) {
      auto& column = state.theta_star[k - 1];
      column.resize(entries.rbegin()->first);
      for (const auto& [j, value] : entries) column[j - 1] = value;
    }
    states.push_back(std::move(state));
  }
  return states;
}

void write_point_partitions_csv(const std::string& path,
                                std::span<const LabelVector> points) {
  std::ofstream out = create_or_throw(path);
  out << "i,k,label\n";
  for (std::size_t k = 0; k < points.size(); ++k) {
    for (std::size_t i = 0; i < points[k].size(); ++i) {
      out << (i + 1) << ',' << (k + 1) << ','
          << (points[k].label(static_cast<int>(i)) + 1) << '\n';
    }
  }
}

std::vector<LabelVector> load_point_partitions_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  long line_no = 0;
  std::getline(in, line);
  ++line_no;
  expect_header(line, "i,k,label", path);
  std::map<long, std::map<long, int>> cells;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 3 fields");
    }
    cells[parse_int(fields[1], path, line_no)][parse_int(fields[0], path, line_no)] =
        static_cast<int>(parse_int(fields[2], path, line_no));
  }
  std::vector<LabelVector> points;
  for (const auto& [k, units] : cells) {
    std::vector<int> raw(units.size());
    for (const auto& [i, label] : units) raw[i - 1] = label;
    points.push_back(LabelVector::from_labels(raw));
  }
  return points;
}

void write_jk_posterior_csv(const std::string& path, const Eigen::MatrixXd& table) {
  std::ofstream out = create_or_throw(path);
  out << "k,j,prob\n";
  for (long k = 0; k < table.rows(); ++k) {
    for (long j = 0; j < table.cols(); ++j) {
      if (table(k, j) == 0.0) continue;
      out << (k + 1) << ',' << (j + 1) << ',' << table(k, j) << '\n';
    }
  }
}

void write_curves_grid_csv(const std::string& path,
                           std::span<const std::string> ids,
                           std::span<const double> grid,
                           const std::vector<std::vector<double>>& fitted) {
  std::ofstream out = create_or_throw(path);
  out << "series_id,x,yhat\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      out << ids[i] << ',' << grid[g] << ',' << fitted[i][g] << '\n';
    }
  }
}

void write_metrics_csv(const std::string& path,
                       const std::vector<std::tuple<std::string, int, double>>& rows) {
  std::ofstream out = create_or_throw(path);
  out << "metric,k,value\n";
  for (const auto& [name, k, value] : rows) {
    out << name << ',';
    if (k > 0) out << k;
    out << ',' << value << '\n';
  }
}

void write_manifest(const std::string& path, const RunConfig& cfg,
                    const std::map<std::string, std::string>& extra) {
  std::ofstream out = create_or_throw(path);
  out << "smrpm_version: 0.1.0\n";
  out << "config_hash: " << cfg.config_hash() << "\n";
  out << "seed: " << cfg.chain.seed << "\n";
  out << "chains: " << cfg.chains << "\n";
  for (const auto& [key, value] : extra) out << key << ": " << value << "\n";
}

void write_curves_svg(const std::string& path, std::span<const double> grid,
                      const std::vector<std::vector<double>>& fitted,
                      const std::vector<int>& color_group) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  const int width = 720, height = 400, pad = 30;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& curve : fitted) {
    for (double v : curve) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const double x0 = grid.front(), x1 = grid.back();

  std::ofstream out = create_or_throw(path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n";
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    out << "<polyline fill='none' stroke='"
        << kPalette[color_group[i] % 8] << "' stroke-width='1.2' points='";
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double px =
          pad + (grid[g] - x0) / (x1 - x0) * (width - 2 * pad);
      const double py =
          height - pad - (fitted[i][g] - lo) / (hi - lo) * (height - 2 * pad);
      out << px << ',' << py << ' ';
    }
    out << "'/>\n";
  }
  out << "</svg>\n";
}

}  // namespace smrpm
