#pragma once

// Self-consistent solver for the semiclassical Schafroth-pair model: radial
// k = 0 ground state coupled to Maxwell's equation with the London current,
// field profile and penetration depth.

#include <cstddef>
#include <optional>
#include <vector>

namespace sflab::meissner {

/// Uniform radial grid on [0, R_max] with R on a node.
struct CylinderGeometry {
    double R = 0.0;                    // sample radius
    double R_max = 0.0;                // computational outer radius (>= 2R)
    std::size_t intervals_to_R = 0;    // grid spacing = R / intervals_to_R
    double height = 1.0;               // cylinder height (enters the density)

    double spacing() const { return R / static_cast<double>(intervals_to_R); }
    std::size_t node_of_R() const { return intervals_to_R; }
    std::size_t node_count() const;    // nodes 0..node_count()-1 span [0, R_max]
    double radius_at(std::size_t i) const { return spacing() * static_cast<double>(i); }
    void validate() const;
};

struct PhysicalUnits {
    double e = 1.0;      // pair charge (2 e0 in SI)
    double m = 1.0;      // pair mass
    double mu0 = 1.0;
    double hbar = 1.0;
    enum class Mode { dimensionless, si } mode = Mode::dimensionless;

    static PhysicalUnits dimensionless();
    static PhysicalUnits si_pairs();   // Schafroth pairs in MKS
    void validate() const;
};

/// Vector potential (theta component) and axial induction on the grid.
struct FieldProfile {
    std::vector<double> a;      // a(rho_i)
    std::vector<double> b_z;    // B_z(rho_i)
    double b_ext = 0.0;
};

struct ScfState {
    std::vector<double> phi0;   // radial ground state, int phi^2 rho drho = 1
    double e0 = 0.0;            // ground eigenvalue of the k = 0 sector
    std::vector<double> density;// n(rho) = N |phi0_3d|^2
    int iterations = 0;
    double residual = 0.0;      // sup-norm change of a at the last step
    std::vector<double> residual_history;
    bool converged = false;
    std::optional<double> e0_k1;// optional k = 1 sector diagnostic
};

struct ScfConfig {
    double n_particles = 1.0;
    double tol = 1e-10;
    double mix = 0.5;
    int max_iter = 200;
    bool k_sector_diagnostic = false;
    /// When set, the Maxwell source density is held at this profile and the
    /// iteration starts at its own fixed point.
    std::optional<std::vector<double>> frozen_density;
};

/// alpha(rho) = (e/hbar) a(rho) on the grid.
std::vector<double> effective_alpha(const FieldProfile& profile,
                                    const PhysicalUnits& units);

/// Vacuum profile a = B_ext rho / 2, B_z = B_ext.
FieldProfile vacuum_profile(double b_ext, const CylinderGeometry& g);

struct RadialEigenResult {
    double e0 = 0.0;
    std::vector<double> phi;    // int phi^2 rho drho = 1, phi >= 0
    int iterations = 0;
    bool converged = false;
};

/// Lowest eigenpair of -phi'' - phi'/rho + (k/rho + alpha)^2 phi
///   = (2m/hbar^2) E phi
/// on (0, R_max): regularity at 0 (k = 0) or Dirichlet at 0 (k != 0),
/// Dirichlet at R_max. Second-order finite-volume discretization; the rho = 0
/// coordinate singularity is handled by the even-extension cell.
RadialEigenResult radial_ground_state(const std::vector<double>& alpha,
                                      const CylinderGeometry& g,
                                      const PhysicalUnits& units,
                                      int angular_k = 0);

/// Linear Maxwell step: solves a'' + a'/rho - a/rho^2 = mu0 (e^2/m) n a on
/// (0, R) with a(0) = 0 and induction continuity B_z(R) = B_ext, extends
/// outside R by B_ext rho/2 + c/rho (c from continuity of a), and recomputes
/// B_z from (rho a)'/rho.
FieldProfile maxwell_update(const std::vector<double>& density, double b_ext,
                            const CylinderGeometry& g, const PhysicalUnits& units);

/// Damped alternation of radial_ground_state and maxwell_update until
/// sup|da| < tol or max_iter. Non-convergence is reported in the returned
/// state (residual history kept), not thrown.
std::pair<ScfState, FieldProfile> scf_solve(double b_ext,
                                            const CylinderGeometry& g,
                                            const PhysicalUnits& units,
                                            const ScfConfig& config);

struct PenetrationFit {
    double lambda = 0.0;
    double r_squared = 0.0;
    std::size_t points_used = 0;
    std::size_t points_excluded = 0;   // non-positive B_z samples
    bool decay_found = false;
};

/// Log-linear fit of B_z(rho) sqrt(rho/R) against (R - rho) over
/// [fit_min, fit_max]; the sqrt factor cancels the cylindrical I0 prefactor.
/// A non-decaying profile is flagged (decay_found = false, lambda = inf).
PenetrationFit penetration_depth(const FieldProfile& profile,
                                 const CylinderGeometry& g,
                                 double fit_min, double fit_max);

/// London depth sqrt(m / (mu0 e^2 n0)).
double london_depth(double n0, const PhysicalUnits& units);

} // namespace sflab::meissner
