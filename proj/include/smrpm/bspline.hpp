#ifndef SMRPM_BSPLINE_HPP_
#define SMRPM_BSPLINE_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace smrpm {

// A clamped B-spline basis of a given degree over a closed interval.
//
// Knots are stored with explicit multiplicity: the first and last knot are
// each repeated degree+1 times, so the number of basis functions is
// K = knots.size() - degree - 1.  Evaluation uses half-open knot spans
// except at the right endpoint, which is folded into the last span so that
// observations at the domain boundary are usable.
class BasisSpec {
 public:
  // Builds a spec from an explicit clamped knot vector.  Throws
  // std::invalid_argument if the knots are decreasing, the boundary
  // multiplicities are wrong, or fewer than degree+1 basis functions result.
  BasisSpec(int degree, std::vector<double> knots);

  // Evenly spaced interior knots over [lo, hi] with num_basis functions.
  // Requires num_basis >= degree + 1 and lo < hi.
  static BasisSpec make_even(double lo, double hi, int degree, int num_basis);

  int degree() const { return degree_; }
  int num_basis() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  const std::vector<double>& knots() const { return knots_; }
  double domain_lo() const { return knots_.front(); }
  double domain_hi() const { return knots_.back(); }
  bool in_domain(double x) const { return x >= domain_lo() && x <= domain_hi(); }

  // Index mu of the knot span containing x: knots[mu] <= x < knots[mu+1],
  // with x == domain_hi mapped to the last non-empty span.  The nonzero basis
  // functions at x are mu-degree .. mu.  Throws std::out_of_range if x lies
  // outside the domain.
  int find_span(double x) const;

  // Number of non-empty knot spans (== num_basis - degree for simple
  // interior knots).
  int num_spans() const;

  // 0-based index of the non-empty span containing x, in [0, num_spans()).
  int span_of(double x) const;

 private:
  int degree_;
  std::vector<double> knots_;
};

// All K basis function values at x by the Cox-de Boor recursion.  Entries
// are non-negative, at most degree+1 are nonzero and they sum to one.
std::vector<double> eval_basis(const BasisSpec& spec, double x);

// The nonzero slice of the basis at x: values[r] = b_{first+r}(x) for
// r = 0..degree.
struct LocalBasis {
  int first = 0;
  std::vector<double> values;  // degree + 1 entries
};
LocalBasis eval_basis_local(const BasisSpec& spec, double x);

// Row m holds eval_basis(points[m]).  Throws std::out_of_range naming the
// offending index if any point lies outside the domain.
Eigen::MatrixXd design_matrix(const BasisSpec& spec, std::span<const double> points);

}  // namespace smrpm

#endif  // SMRPM_BSPLINE_HPP_
