#include "fspif/dirichlet.hpp"

#include <cmath>
#include <string>

#include "fspif/parallel.hpp"

namespace fspif {

DiskBoundary DiskBoundary::sampled(double radius, int nodes, const std::function<double(Vec2)>& f) {
  DiskBoundary b;
  b.radius = radius;
  b.nodes = nodes;
  b.data.resize(static_cast<std::size_t>(std::max(nodes, 0)));
  b.validate();
  for (int j = 0; j < nodes; ++j) b.data[static_cast<std::size_t>(j)] = f(b.node(j));
  return b;
}

Vec2 DiskBoundary::node(int j) const {
  const double theta = 2.0 * kPi * j / nodes;
  return {radius * std::cos(theta), radius * std::sin(theta)};
}

std::vector<Vec2> DiskBoundary::node_positions() const {
  std::vector<Vec2> out(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) out[static_cast<std::size_t>(j)] = node(j);
  return out;
}

void DiskBoundary::validate() const {
  if (!(radius > 0.0)) throw InputError("boundary radius must be positive");
  if (nodes < 8) throw InputError("at least 8 boundary nodes are required");
  if (data.size() != static_cast<std::size_t>(nodes)) throw InputError("boundary data size must equal N_B");
}

namespace {

void check_target(Vec2 x, double radius) {
  if (norm(x) > kSafeRadiusFraction * radius * (1.0 + 1e-12)) {
    throw NearBoundaryError("target at distance " + std::to_string(norm(x)) +
                            " is outside the safe disk of radius " +
                            std::to_string(kSafeRadiusFraction * radius));
  }
}

std::vector<Vec2> circle_nodes(double radius, std::size_t n) {
  std::vector<Vec2> z(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    z[j] = {radius * std::cos(theta), radius * std::sin(theta)};
  }
  return z;
}

struct Harmonic {
  double potential = 0.0;
  Vec2 field;
};

Harmonic evaluate(Vec2 x, double radius, std::span<const Vec2> nodes, std::span<const double> data) {
  check_target(x, radius);
  const double num = radius * radius - norm2(x);
  double pot = 0.0;
  Vec2 field;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const Vec2 d = nodes[j] - x;
    const double r2 = norm2(d);
    const double f = data[j] / r2;
    pot += f;
    field += (x * r2 - d * num) * (f / r2);
  }
  const double n = static_cast<double>(nodes.size());
  return {num * pot / n, field * (2.0 / n)};
}

}  // namespace

double harmonic_potential(Vec2 x, double radius, std::span<const double> data) {
  return evaluate(x, radius, circle_nodes(radius, data.size()), data).potential;
}

Vec2 harmonic_field(Vec2 x, double radius, std::span<const double> data) {
  return evaluate(x, radius, circle_nodes(radius, data.size()), data).field;
}

DirichletCorrection compose_dirichlet(const FreeSpaceSolver& solver, std::span<const Complex> xhat,
                                      double q, std::span<const Vec2> positions,
                                      const DiskBoundary& boundary) {
  boundary.validate();
  DirichletCorrection out;
  const auto nodes = boundary.node_positions();
  const auto psi = solver.eval_potential(xhat, q, nodes, true);
  out.residual.resize(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) out.residual[j] = boundary.data[j] - psi[j];

  const double margin = boundary.radius - 2.0 * solver.config().shape.support_radius;
  out.field.resize(positions.size());
  std::vector<double> potential(positions.size());
  parallel_for(positions.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto h = evaluate(positions[i], boundary.radius, nodes, out.residual);
      out.field[i] = h.field;
      potential[i] = h.potential;
    }
  });
  double energy = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (norm(positions[i]) > margin) ++out.margin_violations;
    energy += potential[i];
  }
  out.harmonic_energy = 0.5 * q * energy;
  return out;
}

}  // namespace fspif
