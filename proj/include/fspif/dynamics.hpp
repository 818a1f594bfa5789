#pragma once

// Single-species particle state, leapfrog and Boris pushers, and the
// conservation diagnostics. Velocities are staggered: during a run the
// ensemble holds X^n and V^{n-1/2}.

#include <functional>
#include <span>
#include <vector>

#include "fspif/nufft.hpp"
#include "fspif/shapes.hpp"
#include "fspif/types.hpp"

namespace fspif {

struct ParticleEnsemble {
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;
  double charge = 1.0;  // per particle
  double mass = 1.0;

  std::size_t size() const { return positions.size(); }
  double charge_to_mass() const { return charge / mass; }
  void validate() const;
};

// Acceleration from fields that depend on positions only (the electric part).
using AccelerationFn = std::function<std::vector<Vec2>(const ParticleEnsemble&)>;

// Cyclotron frequency q B_z / m of the axial field.
inline double cyclotron_frequency(const ParticleEnsemble& e, double bz) {
  return e.charge_to_mass() * bz;
}

// V x (B_z e_z) per unit charge-to-mass: (v_y, -v_x) * B_z.
inline Vec2 cross_bz(Vec2 v, double bz) { return {v.y * bz, -v.x * bz}; }

// V^{-1/2} = V^0 - (dt/2) [a(X^0) + (q/m) V^0 x B].
void bootstrap_half_step(ParticleEnsemble& e, std::span<const Vec2> accel, double bz, double dt);

// V += dt a.
void kick(ParticleEnsemble& e, std::span<const Vec2> accel, double dt);
// X += dt V.
void drift(ParticleEnsemble& e, double dt);

// Half electric kick, rotation by -2 atan(omega dt / 2), half electric kick.
void boris_kick(ParticleEnsemble& e, std::span<const Vec2> accel, double bz, double dt);

// Kick with a(X^n) then drift.
void leapfrog_step(ParticleEnsemble& e, const AccelerationFn& accel, double dt);
void boris_step(ParticleEnsemble& e, const AccelerationFn& accel, double bz, double dt);

struct EnergyReport {
  double time = 0.0;
  double kinetic = 0.0;
  double electric = 0.0;
  double harmonic = 0.0;

  double total() const { return kinetic + electric + harmonic; }
};

// (1/2) m sum |V|^2.
double kinetic_energy(std::span<const Vec2> velocities, double mass);
// (V^{n-1/2} + V^{n+1/2}) / 2.
std::vector<Vec2> midpoint_velocities(std::span<const Vec2> before, std::span<const Vec2> after);

Vec2 momentum(const ParticleEnsemble& e);

// (1/2) w sum_k Re(conj(rho^) phi^) over paired modes.
double electrostatic_energy_dual(const ModeGrid& grid, std::span<const Complex> rho_hat,
                                 std::span<const Complex> phi_hat);

// (1/2) w sum_k G(k) |S^(k)|^2 |q X^(k)|^2 over paired modes, for an
// arbitrary radial Green's function.
double electrostatic_energy(const ModeGrid& grid, std::span<const Complex> xhat, double q,
                            const ShapeFunction& shape, const std::function<double(double)>& green);

// Periodic diagnostic on the unit box: G = 1/k^2 with k = 0 excluded,
// alpha = 1 and unit weight. Uses a direct type-1 sum.
double periodic_energy(std::span<const Vec2> positions, double q, int modes_per_dim,
                       const ShapeFunction& shape);

}  // namespace fspif
