#pragma once

// Exact free-fermion spectral engine for the Girardeau (hard-core Bose) model:
// boosted spectra of H~ + v*P, umklapp ladders, window enumeration, the
// metastability verdict, Landau velocity and sound speed.
//
// All spectral quantities are exact: with k_n = 2*pi*n/L and single-particle
// energy k^2 (m = 1/2), every eigenvalue is an integer times s^2 and every
// momentum an integer times s, where s = 2*pi/L. Boosting by a lattice
// velocity v = w*s keeps the combination lambda = dE + v*P an integer times
// s^2, so spectra are compared in integer arithmetic and floats appear only
// at the I/O boundary.

#include <cstdint>
#include <utility>
#include <vector>

#include "sflab/lattice.hpp"

namespace sflab::girardeau {

using lattice::SystemGeometry;

/// A free-fermion eigenstate: N distinct occupied lattice indices (sorted).
struct FermiConfig {
    std::vector<long> occupied;
    SystemGeometry geometry;
};

/// One point of the boosted energy-momentum spectrum.
struct SpectrumPoint {
    double lambda = 0.0;   // E - E0 + v*P
    double k = 0.0;        // total momentum
};

/// Integer-exact spectrum point: lambda = (de + w*p) * s^2, k = p * s.
struct WindowState {
    std::int64_t de = 0;   // (E - E0) / s^2
    std::int64_t p = 0;    // P / s
};

/// r successive umklapp excitations applied to the Fermi sea.
struct UmklappLadder {
    int rungs = 0;
    std::vector<std::pair<long, long>> moves;   // (from index, to index)
    double e_total = 0.0;                       // eigenvalue of H~ + v*P
};

/// Energy/momentum cutoffs of the metastability window (Definition 3).
struct MetastabilityWindow {
    double energy_cutoff = 0.0;     // c
    double momentum_cutoff = 0.0;   // d

    void validate() const;
    /// Proposition-1 defaults c = 2*(pi*rho)^2, d = pi*rho.
    static MetastabilityWindow proposition_defaults(double rho);
};

enum class DispersionConvention { paper, m_half };

DispersionConvention parse_convention(const std::string& name);
const char* convention_name(DispersionConvention c);

/// Cap on the number of enumerated configurations.
struct EnumerationBudget {
    std::uint64_t max_configs = 50'000'000;
};

/// Ground Fermi sea {-(N-1)/2, ..., (N-1)/2}. Rejects even N.
FermiConfig ground_config(const SystemGeometry& g);

/// Fermi momentum pi*(N-1)/L of the finite sea.
double fermi_momentum(const SystemGeometry& g);

std::int64_t index_energy_sum(const FermiConfig& c);    // sum n_i^2
std::int64_t index_momentum_sum(const FermiConfig& c);  // sum n_i

double energy(const FermiConfig& c);      // s^2 * sum n_i^2
double momentum(const FermiConfig& c);    // s   * sum n_i

/// Closed-form ground energy 2 * sum_{p=1}^{(N-1)/2} (2*pi*p/L)^2.
double ground_energy_closed_form(int particle_count, double box_length);

/// lambda = E(c) - E(ground) + v*P(c); v must be a lattice velocity.
SpectrumPoint boosted_point(const FermiConfig& c, double v);

/// Type-1 (particle) excitation energy at momentum k.
/// paper convention: k^2/2 + k_F*|k|;  m_half: k^2 + 2*k_F*|k|.
double type1_dispersion(double k, double k_fermi, DispersionConvention conv);

/// Sea with every occupied index shifted by `shift` (a Galilei kick by
/// shift * 2*pi/L).
FermiConfig galilean_shifted_sea(const SystemGeometry& g, long shift);

/// The ladder of r umklapp excitations: the i-th move takes the particle at
/// index (N-1)/2 - (i-1) to -(N-1)/2 - i; every move carries momentum
/// -2*k_F - 2*pi/L. Throws if r exceeds the sea.
UmklappLadder umklapp_ladder(int rungs, double v, const SystemGeometry& g);

/// Exhaustive minimum of lambda over all C(2W+1, N) index subsets of
/// [-W, W]. Monotone non-increasing in W; equal to the global minimum once
/// W >= sufficient_window(g, v).
double bruteforce_min(const SystemGeometry& g, double v, long window,
                      const EnumerationBudget& budget = {});

/// ceil(|v|*L/(2*pi)) + (N-1)/2: beyond this any occupied index strictly
/// increases k^2 + v*k, so bruteforce_min(W) has reached the global minimum.
long sufficient_window(const SystemGeometry& g, double v);

/// Number of subsets the oracle would visit (saturates at 2^63-1).
std::uint64_t bruteforce_cost(const SystemGeometry& g, long window);

/// All eigenstates with E - E0 <= c and |P| <= d, as integer-exact states at
/// v = 0. Completeness follows from the single-particle bound k^2 <= E0 + c.
std::vector<WindowState> window_states(const SystemGeometry& g,
                                       const MetastabilityWindow& w,
                                       const EnumerationBudget& budget = {});

/// Same list as (lambda = dE at v = 0, k) pairs.
std::vector<SpectrumPoint> enumerate_window(const SystemGeometry& g,
                                            const MetastabilityWindow& w,
                                            const EnumerationBudget& budget = {});

/// The Definition-3 metastable subspace: multi type-1 excitations (holes
/// confined to the Fermi-sea edges, particles outside the sea on the same
/// side), intersected with the window.
std::vector<WindowState> edge_type1_states(const SystemGeometry& g,
                                           const MetastabilityWindow& w,
                                           const EnumerationBudget& budget = {});

struct MetastabilityReport {
    bool all_nonneg = false;        // Definition-3 subspace verdict
    double min_lambda = 0.0;        // minimum over the subspace
    bool nontrivial = false;        // some strictly positive eigenvalue present
    bool window_all_nonneg = false; // diagnostic: verdict over the full window
    double window_min_lambda = 0.0;
    std::size_t subspace_count = 0;
    std::size_t window_count = 0;
    bool empty_window = false;
};

/// Definition-3 verdict at lattice velocity v, plus the full-window minimum
/// as a diagnostic (see module notes: the full window contains deep-hole
/// type-2 states that go negative already for |v| > 2k_F - d).
MetastabilityReport metastability_check(const SystemGeometry& g, double v,
                                        const MetastabilityWindow& w,
                                        double tol = 1e-10,
                                        const EnumerationBudget& budget = {});

struct NessLimitPoints {
    std::vector<double> lambda;        // lambda_j = -2*pi*rho*v*j
    bool within_proposition_window = false;   // 0 < |v| < 2*pi*rho
};

/// Proposition-1 limit points lambda_j for j = 1..j_max. Values outside the
/// proposition window are still computed but flagged unverified.
NessLimitPoints ness_limit_points(double rho, double v, int j_max);

/// A sampled dispersion curve plus its analytic small-k slope.
struct DispersionCurve {
    std::vector<std::pair<double, double>> samples;   // (k, eps), k != 0
    double slope_at_zero = 0.0;
};

DispersionCurve type1_curve(double k_fermi, DispersionConvention conv,
                            int n_samples, double k_max);
DispersionCurve free_particle_curve(int n_samples, double k_max);

/// Landau critical velocity: infimum of eps(k)/|k| over the samples and the
/// k -> 0 limit. Rejects empty curves.
double landau_velocity(const DispersionCurve& curve);

struct SoundSpeedReport {
    double c_s_dispersion = 0.0;      // small-k slope of the type-1 curve
    double c_s_thermo = 0.0;          // [(-L/(m*rho)) dP/dL]^{+1/2}
    double pressure = 0.0;            // -dE0/dL
    double stiffness = 0.0;           // -L dP/dL, Girardeau E0
    double stiffness_free_boson = 0.0;// same functional on E0 = N/L^2
};

/// Sound speed two ways plus the free-boson contrast, all evaluated
/// analytically on the closed-form E0(N, L). The thermodynamic route uses
/// exponent +1/2 (the -1/2 variant is dimensionally inconsistent).
SoundSpeedReport sound_speed_and_compressibility(const SystemGeometry& g);

struct LinearFit {
    double limit = 0.0;        // a in value = a + b/L
    double rate = 0.0;         // b
    double max_residual = 0.0;
};

/// Least-squares fit value = a + b/L over (L, value) pairs. Requires at
/// least 3 points with strictly increasing L.
LinearFit extrapolate(const std::vector<std::pair<double, double>>& points);

} // namespace sflab::girardeau
