#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjnet {

/// Raised when an operation's preconditions are not met.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a solver produces non-finite values or a numeric check fails.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FarBoundary { frozen, extrapolate };

/// K half-line branches glued at x = 0. Branch i occupies (-length_i, 0].
struct JunctionNetwork {
  std::vector<double> lengths;
  std::vector<FarBoundary> far_bc;

  static JunctionNetwork uniform(std::size_t branches, double length,
                                 FarBoundary bc = FarBoundary::frozen);
  static JunctionNetwork with_lengths(std::vector<double> lengths,
                                      FarBoundary bc = FarBoundary::frozen);

  std::size_t branches() const { return lengths.size(); }
  void validate() const;

  bool operator==(const JunctionNetwork&) const = default;
};

/// Uniform grid on every branch. Interior node j (1-based) of branch i sits at
/// x = -j*dx; node n_i is the far-boundary node.
class Grid {
 public:
  Grid(JunctionNetwork network, double dx, std::vector<std::size_t> nodes);

  const JunctionNetwork& network() const { return network_; }
  double dx() const { return dx_; }
  std::size_t branches() const { return nodes_.size(); }
  std::size_t nodes(std::size_t branch) const { return nodes_[branch]; }
  const std::vector<std::size_t>& node_counts() const { return nodes_; }
  std::size_t total_nodes() const;  // junction included
  FarBoundary far_bc(std::size_t branch) const { return network_.far_bc[branch]; }

  /// Branch coordinate of node j (1-based); j = 0 is the junction.
  double coordinate(std::size_t j) const { return -static_cast<double>(j) * dx_; }

  bool operator==(const Grid&) const = default;

 private:
  JunctionNetwork network_;
  double dx_;
  std::vector<std::size_t> nodes_;
};

Grid build_grid(const JunctionNetwork& network, double dx);

/// Nodal values: one shared junction value plus per-branch interior values
/// ordered from the junction outward. Continuity at x = 0 is structural.
struct GridFunction {
  double junction = 0.0;
  std::vector<std::vector<double>> values;

  static GridFunction zeros(const Grid& grid);
  static GridFunction constant(const Grid& grid, double c);

  std::size_t branches() const { return values.size(); }
  /// Value at node j of a branch, j = 0 being the junction.
  double at(std::size_t branch, std::size_t j) const {
    return j == 0 ? junction : values[branch][j - 1];
  }
  bool matches(const Grid& grid) const;
  bool same_shape(const GridFunction& other) const;
  bool all_finite() const;
  /// "junction" or "branch i node j of n" for the first non-finite entry, "" if none.
  std::string first_nonfinite() const;

  GridFunction& operator+=(double c);
  bool operator==(const GridFunction&) const = default;
};

GridFunction operator+(GridFunction u, double c);

using BranchProfile = std::function<double(double)>;

/// Samples per-branch initial data u0_i(x_i), x_i <= 0. The branch profiles
/// must agree at x = 0 to within 1e-12.
GridFunction sample_initial(const Grid& grid, std::span<const BranchProfile> u0);
GridFunction sample_initial(const Grid& grid, const BranchProfile& u0);

double sup_distance(const GridFunction& u, const GridFunction& v);
/// Sup distance restricted to nodes with |x| <= radius.
double sup_distance(const GridFunction& u, const GridFunction& v, const Grid& grid,
                    double radius);
/// max over nodes of (u - v).
double max_difference(const GridFunction& u, const GridFunction& v);

/// Largest difference quotient between neighbouring nodes, junction included.
double discrete_lipschitz(const GridFunction& u, double dx);

}  // namespace hjnet
