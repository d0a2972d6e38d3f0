#pragma once

// Momentum-lattice geometry, the velocity prescription and Galilean boost
// energy bookkeeping. Units: hbar = 1 throughout; the mass is an explicit
// parameter because the source material mixes m = 1 and m = 1/2 conventions.

#include <string>

namespace sflab::lattice {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Periodic box of length L holding N identical particles.
struct SystemGeometry {
    double box_length = 0.0;   // L
    int particle_count = 0;    // N
    double mass = 0.5;         // Girardeau default

    double density() const { return particle_count / box_length; }
    double spacing() const { return kTwoPi / box_length; }

    /// Throws std::invalid_argument unless L > 0 and N >= 1.
    void validate() const;
};

/// One-dimensional momentum lattice S_L = { 2*pi*n/L : n integer }.
struct MomentumLattice {
    double box_length = 0.0;

    double spacing() const { return kTwoPi / box_length; }
    double point(long n) const { return spacing() * static_cast<double>(n); }

    void validate() const;
};

/// Result of applying the prescription to a target velocity.
struct BoostSpec {
    double v_target = 0.0;
    double v_lattice = 0.0;
    long index = 0;            // v_lattice = index * spacing
    std::string tie_rule = "sign-of-v-then-smaller-magnitude";
};

/// Nearest lattice point to v among points of magnitude <= |v|.
/// Deterministic tie-break: candidate with the sign of v, then the smaller
/// magnitude. v = 0 maps to 0.
BoostSpec prescription(double v, const MomentumLattice& lat);

/// Energy imparted by setting N particles of mass m into motion at velocity v:
/// N*m*v^2/2.
double boost_energy_shift(int particle_count, double v, double mass);

/// Bottom of the boosted spectrum in the continuum: -N*m*v^2/2. Finite
/// lattices approach this value from above.
double boosted_floor(int particle_count, double v, double mass);

/// Integer lattice index w with v = w * (2*pi/L). Throws std::invalid_argument
/// if v is not on the lattice (relative tolerance 1e-9).
long velocity_index(double v, double box_length);

/// Nearest odd integer to rho*L (ties toward the smaller value), clamped to
/// at least 1. Used to build geometry sequences at fixed density.
int nearest_odd_count(double rho, double box_length);

} // namespace sflab::lattice
