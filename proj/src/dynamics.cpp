#include "fspif/dynamics.hpp"

#include <cmath>
#include <limits>

namespace fspif {

void ParticleEnsemble::validate() const {
  if (positions.size() != velocities.size()) throw InputError("positions and velocities differ in length");
  if (!(mass > 0.0)) throw InputError("particle mass must be positive");
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (!std::isfinite(positions[j].x) || !std::isfinite(positions[j].y) ||
        !std::isfinite(velocities[j].x) || !std::isfinite(velocities[j].y)) {
      throw InputError("non-finite particle state at index " + std::to_string(j));
    }
  }
}

namespace {

void check_accel(const ParticleEnsemble& e, std::span<const Vec2> accel) {
  if (accel.size() != e.size()) throw InputError("acceleration count does not match the ensemble");
}

// The Boris update v+ = v- + (v- + v- x t) x s is the rotation
// [[c, s], [-s, c]] with c = 1 - s t. Rounded naively, c^2 + s^2 misses 1 by
// up to ~1e-16, and that bias compounds every step. For c within a few dozen
// ulps of the exact value, take s = sqrt(1 - c^2) and its neighbours, and keep
// the pair closest to the unit circle; the angle moves by ~1e-14 at most.
struct Rotation {
  double c;
  double s;
};

Rotation boris_rotation(double t) {
  if (t == 0.0) return {1.0, 0.0};
  const long double tl = t;
  const long double cl = (1.0L - tl * tl) / (1.0L + tl * tl);
  const long double sl = 2.0L * tl / (1.0L + tl * tl);
  Rotation best{static_cast<double>(cl), static_cast<double>(sl)};
  long double best_gap = std::numeric_limits<long double>::infinity();
  double c = static_cast<double>(cl);
  for (int i = 0; i < 32; ++i) c = std::nextafter(c, -2.0);
  for (int i = 0; i < 65; ++i, c = std::nextafter(c, 2.0)) {
    const long double cc = c;
    double s = static_cast<double>(std::copysign(std::sqrt(std::fabs(1.0L - cc * cc)), sl));
    s = std::nextafter(std::nextafter(s, -2.0), -2.0);
    for (int k = 0; k < 5; ++k, s = std::nextafter(s, 2.0)) {
      const long double ss = s;
      const long double gap = std::fabs(cc * cc + ss * ss - 1.0L);
      if (gap < best_gap) {
        best_gap = gap;
        best = {c, s};
      }
    }
  }
  return best;
}

}  // namespace

void bootstrap_half_step(ParticleEnsemble& e, std::span<const Vec2> accel, double bz, double dt) {
  check_accel(e, accel);
  const double qm = e.charge_to_mass();
  for (std::size_t j = 0; j < e.size(); ++j) {
    const Vec2 a = accel[j] + qm * cross_bz(e.velocities[j], bz);
    e.velocities[j] -= (0.5 * dt) * a;
  }
}

void kick(ParticleEnsemble& e, std::span<const Vec2> accel, double dt) {
  check_accel(e, accel);
  for (std::size_t j = 0; j < e.size(); ++j) e.velocities[j] += dt * accel[j];
}

void drift(ParticleEnsemble& e, double dt) {
  for (std::size_t j = 0; j < e.size(); ++j) e.positions[j] += dt * e.velocities[j];
}

void boris_kick(ParticleEnsemble& e, std::span<const Vec2> accel, double bz, double dt) {
  check_accel(e, accel);
  const auto [c, s] = boris_rotation(0.5 * dt * cyclotron_frequency(e, bz));
  // Applied as an increment so rounding scales with the (small) change.
  const double d = 1.0 - c;
  for (std::size_t j = 0; j < e.size(); ++j) {
    const Vec2 minus = e.velocities[j] + (0.5 * dt) * accel[j];
    const Vec2 plus{minus.x + (s * minus.y - d * minus.x), minus.y - (s * minus.x + d * minus.y)};
    e.velocities[j] = plus + (0.5 * dt) * accel[j];
  }
}

void leapfrog_step(ParticleEnsemble& e, const AccelerationFn& accel, double dt) {
  const auto a = accel(e);
  kick(e, a, dt);
  drift(e, dt);
}

void boris_step(ParticleEnsemble& e, const AccelerationFn& accel, double bz, double dt) {
  const auto a = accel(e);
  boris_kick(e, a, bz, dt);
  drift(e, dt);
}

double kinetic_energy(std::span<const Vec2> velocities, double mass) {
  double sum = 0.0;
  for (const auto& v : velocities) sum += norm2(v);
  return 0.5 * mass * sum;
}

std::vector<Vec2> midpoint_velocities(std::span<const Vec2> before, std::span<const Vec2> after) {
  if (before.size() != after.size()) throw InputError("velocity arrays differ in length");
  std::vector<Vec2> out(before.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = 0.5 * (before[j] + after[j]);
  return out;
}

Vec2 momentum(const ParticleEnsemble& e) {
  Vec2 p;
  for (const auto& v : e.velocities) p += v;
  return e.mass * p;
}

double electrostatic_energy_dual(const ModeGrid& grid, std::span<const Complex> rho_hat,
                                 std::span<const Complex> phi_hat) {
  if (rho_hat.size() != grid.size() || phi_hat.size() != grid.size()) {
    throw InputError("mode arrays do not match the grid");
  }
  double sum = 0.0;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    if (grid.unpaired(f)) continue;
    sum += (std::conj(rho_hat[f]) * phi_hat[f]).real();
  }
  return 0.5 * grid.weight() * sum;
}

double electrostatic_energy(const ModeGrid& grid, std::span<const Complex> xhat, double q,
                            const ShapeFunction& shape, const std::function<double(double)>& green) {
  if (xhat.size() != grid.size()) throw InputError("mode array does not match the grid");
  double sum = 0.0;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    if (grid.unpaired(f)) continue;
    const double s = norm(grid.wavevector(f));
    const double sh = shape.fourier(s);
    sum += green(s) * sh * sh * std::norm(xhat[f]);
  }
  return 0.5 * q * q * grid.weight() * sum;
}

double periodic_energy(std::span<const Vec2> positions, double q, int modes_per_dim,
                       const ShapeFunction& shape) {
  const ModeGrid grid{modes_per_dim, 1, 0.5};
  grid.validate();
  std::vector<Complex> ones(positions.size(), Complex{1.0, 0.0});
  const auto xhat = type1_direct(positions, ones, grid);
  return electrostatic_energy(grid, xhat, q, shape, [](double s) { return s > 0.0 ? 1.0 / (s * s) : 0.0; });
}

}  // namespace fspif
