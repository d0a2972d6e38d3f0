#include "sflab/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace sflab::lattice {

void SystemGeometry::validate() const {
    if (!(box_length > 0.0))
        throw std::invalid_argument("SystemGeometry: box length must be positive");
    if (particle_count < 1)
        throw std::invalid_argument("SystemGeometry: particle count must be >= 1");
    if (!(mass > 0.0))
        throw std::invalid_argument("SystemGeometry: mass must be positive");
}

void MomentumLattice::validate() const {
    if (!(box_length > 0.0))
        throw std::invalid_argument("MomentumLattice: box length must be positive");
}

BoostSpec prescription(double v, const MomentumLattice& lat) {
    lat.validate();
    BoostSpec spec;
    spec.v_target = v;
    if (v == 0.0) return spec;

    const double d = lat.spacing();
    // Largest-magnitude lattice index on the side of v with |k_n| <= |v|.
    // The magnitude comparison carries a relative 1e-12 slack so that a
    // velocity already on the lattice maps to itself despite rounding.
    const double mag = std::abs(v) * (1.0 + 1e-12);
    long n = static_cast<long>(std::floor(std::abs(v) / d));
    while (std::abs(lat.point(n + 1)) <= mag) ++n;
    while (n > 0 && std::abs(lat.point(n)) > mag) --n;
    if (v < 0.0) n = -n;

    // All admissible candidates lie on the closed interval between 0 and v,
    // so the nearest one is the extreme point n; among exact ties the rule
    // "sign of v, then smaller magnitude" again selects n.
    spec.index = n;
    spec.v_lattice = lat.point(n);
    return spec;
}

double boost_energy_shift(int particle_count, double v, double mass) {
    if (particle_count < 1)
        throw std::invalid_argument("boost_energy_shift: particle count must be >= 1");
    return particle_count * mass * v * v / 2.0;
}

double boosted_floor(int particle_count, double v, double mass) {
    return -boost_energy_shift(particle_count, v, mass);
}

long velocity_index(double v, double box_length) {
    const double d = kTwoPi / box_length;
    const long w = std::lround(v / d);
    const double snapped = d * static_cast<double>(w);
    const double tol = 1e-9 * std::max(1.0, std::abs(v));
    if (std::abs(snapped - v) > tol)
        throw std::invalid_argument(
            "velocity " + std::to_string(v) + " is not a lattice point for L = " +
            std::to_string(box_length) + "; apply the prescription first");
    return w;
}

int nearest_odd_count(double rho, double box_length) {
    const double target = rho * box_length;
    const long below = 2 * static_cast<long>(std::floor((target - 1.0) / 2.0)) + 1;
    const long above = below + 2;
    long pick = (target - below <= above - target) ? below : above;
    if (pick < 1) pick = 1;
    return static_cast<int>(pick);
}

} // namespace sflab::lattice
