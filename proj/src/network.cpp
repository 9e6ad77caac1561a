#include "hjnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hjnet {

JunctionNetwork JunctionNetwork::uniform(std::size_t branches, double length, FarBoundary bc) {
  return with_lengths(std::vector<double>(branches, length), bc);
}

JunctionNetwork JunctionNetwork::with_lengths(std::vector<double> lengths, FarBoundary bc) {
  JunctionNetwork net;
  net.far_bc.assign(lengths.size(), bc);
  net.lengths = std::move(lengths);
  net.validate();
  return net;
}

void JunctionNetwork::validate() const {
  if (lengths.empty()) throw PreconditionError("network needs at least one branch");
  if (far_bc.size() != lengths.size())
    throw PreconditionError("far_bc must list one rule per branch");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i])) {
      std::ostringstream msg;
      msg << "branch " << i + 1 << " length must be positive and finite";
      throw PreconditionError(msg.str());
    }
  }
}

Grid::Grid(JunctionNetwork network, double dx, std::vector<std::size_t> nodes)
    : network_(std::move(network)), dx_(dx), nodes_(std::move(nodes)) {}

std::size_t Grid::total_nodes() const {
  std::size_t n = 1;
  for (auto k : nodes_) n += k;
  return n;
}

Grid build_grid(const JunctionNetwork& network, double dx) {
  network.validate();
  if (!(dx > 0.0) || !std::isfinite(dx)) throw PreconditionError("dx must be positive");
  std::vector<std::size_t> nodes;
  nodes.reserve(network.branches());
  for (std::size_t i = 0; i < network.branches(); ++i) {
    const auto n = static_cast<long long>(std::llround(network.lengths[i] / dx));
    if (n < 3) {
      std::ostringstream msg;
      msg << "dx=" << dx << " leaves branch " << i + 1 << " with " << n
          << " nodes; at least 3 are required";
      throw PreconditionError(msg.str());
    }
    nodes.push_back(static_cast<std::size_t>(n));
  }
  return Grid(network, dx, std::move(nodes));
}

GridFunction GridFunction::zeros(const Grid& grid) { return constant(grid, 0.0); }

GridFunction GridFunction::constant(const Grid& grid, double c) {
  GridFunction u;
  u.junction = c;
  u.values.resize(grid.branches());
  for (std::size_t i = 0; i < grid.branches(); ++i) u.values[i].assign(grid.nodes(i), c);
  return u;
}

bool GridFunction::matches(const Grid& grid) const {
  if (values.size() != grid.branches()) return false;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i].size() != grid.nodes(i)) return false;
  return true;
}

bool GridFunction::same_shape(const GridFunction& other) const {
  if (values.size() != other.values.size()) return false;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i].size() != other.values[i].size()) return false;
  return true;
}

bool GridFunction::all_finite() const {
  if (!std::isfinite(junction)) return false;
  for (const auto& branch : values)
    for (double v : branch)
      if (!std::isfinite(v)) return false;
  return true;
}

std::string GridFunction::first_nonfinite() const {
  if (!std::isfinite(junction)) return "junction";
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = 0; j < values[i].size(); ++j)
      if (!std::isfinite(values[i][j]))
        return "branch " + std::to_string(i) + " node " + std::to_string(j + 1) + " of " +
               std::to_string(values[i].size());
  return "";
}

GridFunction& GridFunction::operator+=(double c) {
  junction += c;
  for (auto& branch : values)
    for (double& v : branch) v += c;
  return *this;
}

GridFunction operator+(GridFunction u, double c) {
  u += c;
  return u;
}

GridFunction sample_initial(const Grid& grid, std::span<const BranchProfile> u0) {
  if (u0.size() != grid.branches())
    throw PreconditionError("need one initial profile per branch");
  const double z = u0[0](0.0);
  for (std::size_t i = 1; i < u0.size(); ++i) {
    if (std::abs(u0[i](0.0) - z) > 1e-12) {
      std::ostringstream msg;
      msg << "initial data is discontinuous at the junction: branch 1 gives " << z
          << ", branch " << i + 1 << " gives " << u0[i](0.0);
      throw PreconditionError(msg.str());
    }
  }
  GridFunction u;
  u.junction = z;
  u.values.resize(grid.branches());
  for (std::size_t i = 0; i < grid.branches(); ++i) {
    u.values[i].resize(grid.nodes(i));
    for (std::size_t j = 1; j <= grid.nodes(i); ++j)
      u.values[i][j - 1] = u0[i](grid.coordinate(j));
  }
  return u;
}

GridFunction sample_initial(const Grid& grid, const BranchProfile& u0) {
  std::vector<BranchProfile> all(grid.branches(), u0);
  return sample_initial(grid, all);
}

namespace {

void require_same_shape(const GridFunction& u, const GridFunction& v) {
  if (!u.same_shape(v)) throw PreconditionError("grid functions live on different grids");
}

}  // namespace

double sup_distance(const GridFunction& u, const GridFunction& v) {
  require_same_shape(u, v);
  double d = std::abs(u.junction - v.junction);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    for (std::size_t j = 0; j < u.values[i].size(); ++j)
      d = std::max(d, std::abs(u.values[i][j] - v.values[i][j]));
  return d;
}

double sup_distance(const GridFunction& u, const GridFunction& v, const Grid& grid,
                    double radius) {
  require_same_shape(u, v);
  double d = std::abs(u.junction - v.junction);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    for (std::size_t j = 0; j < u.values[i].size(); ++j)
      if (static_cast<double>(j + 1) * grid.dx() <= radius * (1.0 + 1e-12))
        d = std::max(d, std::abs(u.values[i][j] - v.values[i][j]));
  return d;
}

double max_difference(const GridFunction& u, const GridFunction& v) {
  require_same_shape(u, v);
  double d = u.junction - v.junction;
  for (std::size_t i = 0; i < u.values.size(); ++i)
    for (std::size_t j = 0; j < u.values[i].size(); ++j)
      d = std::max(d, u.values[i][j] - v.values[i][j]);
  return d;
}

double discrete_lipschitz(const GridFunction& u, double dx) {
  double lip = 0.0;
  for (const auto& branch : u.values) {
    double prev = u.junction;
    for (double v : branch) {
      lip = std::max(lip, std::abs(v - prev) / dx);
      prev = v;
    }
  }
  return lip;
}

}  // namespace hjnet
