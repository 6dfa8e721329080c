#include "smrpm/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace smrpm {

BasisSpec::BasisSpec(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0) {
    throw std::invalid_argument("BasisSpec: degree must be non-negative");
  }
  if (!std::is_sorted(knots_.begin(), knots_.end())) {
    throw std::invalid_argument("BasisSpec: knots must be non-decreasing");
  }
  const int m = degree_ + 1;
  if (static_cast<int>(knots_.size()) < 2 * m) {
    throw std::invalid_argument("BasisSpec: too few knots for the degree");
  }
  const double lo = knots_.front();
  const double hi = knots_.back();
  if (!(lo < hi)) {
    throw std::invalid_argument("BasisSpec: degenerate domain");
  }
  for (int r = 0; r < m; ++r) {
    if (knots_[r] != lo || knots_[knots_.size() - 1 - r] != hi) {
      throw std::invalid_argument(
          "BasisSpec: boundary knots must have multiplicity degree+1");
    }
  }
  if (static_cast<int>(knots_.size()) > 2 * m && (knots_[m] == lo || knots_[knots_.size() - 1 - m] == hi)) {
    throw std::invalid_argument(
        "BasisSpec: boundary knots must have multiplicity exactly degree+1");
  }
  if (num_basis() < degree_ + 1) {
    throw std::invalid_argument("BasisSpec: need at least degree+1 basis functions");
  }
}

BasisSpec BasisSpec::make_even(double lo, double hi, int degree, int num_basis) {
  if (!(lo < hi)) {
    throw std::invalid_argument("make_even: interval must be non-degenerate");
  }
  if (num_basis < degree + 1) {
    throw std::invalid_argument("make_even: num_basis must be at least degree+1");
  }
  // num_basis - degree spans, hence num_basis - degree - 1 interior knots.
  const int spans = num_basis - degree;
  std::vector<double> knots;
  knots.reserve(num_basis + degree + 1);
  for (int r = 0; r <= degree; ++r) knots.push_back(lo);
  for (int s = 1; s < spans; ++s) {
    knots.push_back(lo + (hi - lo) * static_cast<double>(s) / spans);
  }
  for (int r = 0; r <= degree; ++r) knots.push_back(hi);
  return BasisSpec(degree, std::move(knots));
}

int BasisSpec::find_span(double x) const {
  if (!in_domain(x)) {
    throw std::out_of_range("find_span: point outside basis domain");
  }
  const int hi_span = static_cast<int>(knots_.size()) - degree_ - 2;  // last basis index
  if (x >= domain_hi()) {
    // Right endpoint belongs to the last non-empty span.
    int mu = hi_span;
    while (mu > degree_ && knots_[mu] >= knots_[mu + 1]) --mu;
    return mu;
  }
  // Binary search for knots[mu] <= x < knots[mu+1].
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  int mu = static_cast<int>(it - knots_.begin()) - 1;
  mu = std::clamp(mu, degree_, hi_span);
  return mu;
}

int BasisSpec::num_spans() const {
  int count = 0;
  for (std::size_t r = 0; r + 1 < knots_.size(); ++r) {
    if (knots_[r] < knots_[r + 1]) ++count;
  }
  return count;
}

int BasisSpec::span_of(double x) const {
  const int mu = find_span(x);
  int idx = 0;
  for (int r = degree_; r < mu; ++r) {
    if (knots_[r] < knots_[r + 1]) ++idx;
  }
  return idx;
}

LocalBasis eval_basis_local(const BasisSpec& spec, double x) {
  const int d = spec.degree();
  const int mu = spec.find_span(x);
  const auto& t = spec.knots();

  // Triangular Cox-de Boor scheme over the d+1 functions supported on span mu.
  LocalBasis out;
  out.first = mu - d;
  out.values.assign(d + 1, 0.0);

  std::vector<double> left(d + 1), right(d + 1);
  std::vector<double> work(d + 1);
  work[0] = 1.0;
  for (int r = 1; r <= d; ++r) {
    left[r] = x - t[mu + 1 - r];
    right[r] = t[mu + r] - x;
    double saved = 0.0;
    for (int q = 0; q < r; ++q) {
      const double denom = right[q + 1] + left[r - q];
      const double term = denom > 0.0 ? work[q] / denom : 0.0;
      work[q] = saved + right[q + 1] * term;
      saved = left[r - q] * term;
    }
    work[r] = saved;
  }
  for (int q = 0; q <= d; ++q) out.values[q] = work[q];
  return out;
}

std::vector<double> eval_basis(const BasisSpec& spec, double x) {
  std::vector<double> basis(spec.num_basis(), 0.0);
  const LocalBasis local = eval_basis_local(spec, x);
  for (std::size_t r = 0; r < local.values.size(); ++r) {
    basis[local.first + r] = local.values[r];
  }
  return basis;
}

Eigen::MatrixXd design_matrix(const BasisSpec& spec, std::span<const double> points) {
  Eigen::MatrixXd design(points.size(), spec.num_basis());
  design.setZero();
  for (std::size_t m = 0; m < points.size(); ++m) {
    if (!spec.in_domain(points[m])) {
      throw std::out_of_range("design_matrix: point " + std::to_string(m) +
                              " outside basis domain");
    }
    const LocalBasis local = eval_basis_local(spec, points[m]);
    for (std::size_t r = 0; r < local.values.size(); ++r) {
      design(m, local.first + r) = local.values[r];
    }
  }
  return design;
}

}  // namespace smrpm
