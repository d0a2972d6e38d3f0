// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Each block pins its tolerances in code and measures its own runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "sflab/girardeau.hpp"
#include "sflab/kms.hpp"
#include "sflab/lattice.hpp"
#include "sflab/meissner.hpp"

using namespace sflab;

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

int g_failures = 0;

struct Criterion {
    std::string label;
    double time_limit_s;
    std::vector<std::string> problems;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void require(bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
    }
    void finish() {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (time_limit_s > 0.0 && elapsed > time_limit_s)
            problems.push_back("runtime " + std::to_string(elapsed) + " s exceeds " +
                               std::to_string(time_limit_s) + " s");
        if (problems.empty()) {
            std::printf("[PASS] %s (%.2f s)\n", label.c_str(), elapsed);
        } else {
            ++g_failures;
            std::printf("[FAIL] %s (%.2f s)\n", label.c_str(), elapsed);
            for (const std::string& p : problems)
                std::printf("       - %s\n", p.c_str());
        }
    }
};

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// 1. Boosted floor: bruteforce_min = -N v^2 / 4 exactly for v = 2, L = 2 pi.
void criterion_boosted_floor() {
    Criterion c{"criterion 1: boosted floor -N v^2/4 exact (N=3,5,7; v=2)", 1.0};
    for (int n : {3, 5, 7}) {
        const lattice::SystemGeometry g{kTwoPi, n};
        const double v = 2.0;
        const double got =
            girardeau::bruteforce_min(g, v, girardeau::sufficient_window(g, v));
        const double want = -n * v * v / 4.0;
        c.require(std::abs(got - want) <= 1e-12,
                  "N=" + std::to_string(n) + ": bruteforce " + num(got) + " vs " +
                      num(want));
    }
    c.finish();
}

// 2. Proposition-1 limit points from umklapp ladders extrapolated in 1/L.
void criterion_ness_limit_points() {
    Criterion c{"criterion 2: lambda_j = -2 pi j from L-extrapolated ladders", 10.0};
    const double rho = 1.0, v = 1.0;
    for (int j : {1, 2, 3}) {
        std::vector<std::pair<double, double>> series;
        for (int m = 4; m <= 64; ++m) {
            const double box = kTwoPi * m;
            const int n = lattice::nearest_odd_count(rho, box);
            series.emplace_back(box,
                                girardeau::umklapp_ladder(j, v, {box, n}).e_total);
        }
        const auto fit = girardeau::extrapolate(series);
        const double lambda_j = -2.0 * kPi * rho * v * j;
        const double rel = std::abs(fit.limit - lambda_j) / std::abs(lambda_j);
        c.require(rel < 0.01, "j=" + std::to_string(j) + ": limit " + num(fit.limit) +
                                  " vs " + num(lambda_j) + " (rel " + num(rel) + ")");
    }
    c.finish();
}

// 3. Metastability on the Definition-3 subspace, every prescribed |v| < 2 pi,
//    N <= 15, with a strictly positive eigenvalue in the window.
void criterion_metastability() {
    Criterion c{"criterion 3: windowed nonnegativity for |v| < 2 pi rho, N <= 15", 60.0};
    const auto window = girardeau::MetastabilityWindow::proposition_defaults(1.0);
    for (int n = 3; n <= 15; n += 2) {
        const lattice::SystemGeometry g{static_cast<double>(n), n};
        const double s = g.spacing();
        for (long w = 0; w < n; ++w) {   // w*s < 2 pi exactly at w = n
            const auto report =
                girardeau::metastability_check(g, s * static_cast<double>(w), window,
                                               1e-12);
            c.require(report.all_nonneg,
                      "N=" + std::to_string(n) + " w=" + std::to_string(w) +
                          ": min_lambda " + num(report.min_lambda));
            c.require(report.nontrivial,
                      "N=" + std::to_string(n) + " w=" + std::to_string(w) +
                          ": no strictly positive eigenvalue in the window");
        }
    }
    c.finish();
}

// 4. Landau critical velocity of the type-1 branch, m-half convention.
void criterion_landau() {
    Criterion c{"criterion 4: v_c(type-1, m-half, rho=1) = 2 pi", 5.0};
    const double k_fermi = kPi;
    const auto curve = girardeau::type1_curve(
        k_fermi, girardeau::DispersionConvention::m_half, 20000, 8.0 * kPi);
    const double vc = girardeau::landau_velocity(curve);
    c.require(std::abs(vc - kTwoPi) <= 1e-10,
              "v_c " + num(vc) + " vs " + num(kTwoPi));
    // sampled ratios never undercut the analytic slope
    double sampled = 1e300;
    for (const auto& [k, eps] : curve.samples) sampled = std::min(sampled, eps / k);
    c.require(sampled >= kTwoPi - 1e-12, "sampled ratio " + num(sampled) + " < 2 pi");
    c.finish();
}

// 5. Sound speed and compressibility, both routes plus free-boson contrast.
void criterion_sound() {
    Criterion c{"criterion 5: c_s = 2 pi rho; Girardeau stiffness vs free bosons", 5.0};
    double prev = 0.0, prev_free = 1e300;
    int count = 0;
    for (int n : {3, 5, 7, 9, 11}) {
        const lattice::SystemGeometry g{static_cast<double>(n), n};
        const auto r = girardeau::sound_speed_and_compressibility(g);
        c.require(std::abs(r.c_s_dispersion - kTwoPi) <= 1e-10,
                  "c_s(dispersion) " + num(r.c_s_dispersion));
        c.require(r.stiffness > prev,
                  "stiffness not increasing at N=" + std::to_string(n));
        c.require(r.stiffness_free_boson < prev_free,
                  "free-boson stiffness not decreasing at N=" + std::to_string(n));
        prev = r.stiffness;
        prev_free = r.stiffness_free_boson;
        ++count;
    }
    c.require(count == 5, "expected 5 sizes");
    c.require(prev > 0.9 * 2.0 * kPi * kPi,
              "Girardeau stiffness " + num(prev) + " not near 2 pi^2 rho^3");
    c.require(prev_free < 0.05, "free-boson stiffness " + num(prev_free) +
                                    " does not vanish");
    c.finish();
}

// 6. Theorem-1 mechanism: Gibbs KMS identity and the boosted witness.
void criterion_theorem1() {
    Criterion c{"criterion 6: Gibbs KMS residuals and 4x4 boosted witness", 5.0};
    std::mt19937 rng(20240917);
    std::uniform_int_distribution<int> dim_dist(2, 8);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto grid = kms::default_time_grid();
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int dim = dim_dist(rng);
        kms::Matrix m(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int s = 0; s < dim; ++s)
                m(r, s) = std::complex<double>(gauss(rng), gauss(rng));
        const kms::Matrix h = (m + m.adjoint()) / 2.0;
        kms::Matrix a(dim, dim), b(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int s = 0; s < dim; ++s) {
                a(r, s) = std::complex<double>(gauss(rng), gauss(rng));
                b(r, s) = std::complex<double>(gauss(rng), gauss(rng));
            }
        // beta kept moderate: exp(beta * spectral spread) must stay well
        // inside double precision for the 1e-9 certificate to be meaningful
        const auto state = kms::gibbs(h, 0.2 + 0.015 * i);
        worst = std::max(worst,
                         kms::kms_residual(state, h, a, b, grid).sup_residual);
    }
    c.require(worst <= 1e-9, "Gibbs self-dynamics residual " + num(worst));

    const auto h4 = kms::theorem1_hamiltonian();
    const auto p4 = kms::theorem1_momentum();
    c.require(kms::ness_witness(h4, p4, 0.0, 1.0) <= 1e-10, "witness(0) not zero");
    for (double v : {0.25, 0.5, 1.0}) {
        const double w = kms::ness_witness(h4, p4, v, 1.0);
        c.require(w > 0.0, "witness(" + num(v) + ") = " + num(w) + " not positive");
    }
    c.finish();
}

// 7. Bloch's theorem on the ring, plus the flux-broken regression value.
void criterion_bloch() {
    Criterion c{"criterion 7: Bloch current zero with time reversal, pinned with flux",
                5.0};
    const double flux = kPi / 8.0;
    for (double beta : {0.1, 1.0, 10.0}) {
        const auto clean = kms::bloch_current(kms::ring_hamiltonian(4, 0.0),
                                              kms::ring_bond_current(4, 0.0), beta);
        c.require(clean.time_reversal_ok && clean.current_odd_ok,
                  "preconditions not satisfied at beta=" + num(beta));
        c.require(std::abs(clean.value) <= 1e-12,
                  "current " + num(clean.value) + " at beta=" + num(beta));
    }
    for (double beta : {1.0, 10.0}) {
        const auto broken = kms::bloch_current(kms::ring_hamiltonian(4, flux),
                                               kms::ring_bond_current(4, flux), beta);
        c.require(!broken.time_reversal_ok, "flux case not flagged");
        c.require(std::abs(broken.value) > 1e-3,
                  "flux current " + num(broken.value) + " too small at beta=" +
                      num(beta));
    }
    const auto pinned = kms::bloch_current(kms::ring_hamiltonian(4, flux),
                                           kms::ring_bond_current(4, flux), 1.0);
    c.require(std::abs(pinned.value - 0.044507916423238536) <= 1e-9,
              "regression value drifted: " + num(pinned.value));
    c.finish();
}

// 8. Meissner: London closed form, penetration depth, SCF convergence,
//    size independence.
void criterion_meissner() {
    Criterion c{"criterion 8: London profile, penetration depth, SCF, size sweep",
                30.0};
    const auto units = meissner::PhysicalUnits::dimensionless();

    meissner::CylinderGeometry geom;
    geom.R = 1.0;
    geom.R_max = 2.0;
    geom.intervals_to_R = 4096;
    geom.height = 1.0;
    const double n0 = 100.0;   // lambda_L = 0.1 R
    std::vector<double> frozen(geom.node_count(), 0.0);
    for (std::size_t i = 0; i <= geom.node_of_R(); ++i) frozen[i] = n0;
    const auto profile = meissner::maxwell_update(frozen, 1.0, geom, units);
    const double lam = meissner::london_depth(n0, units);
    double max_rel = 0.0;
    const double denom = std::cyl_bessel_i(0.0, geom.R / lam);
    for (std::size_t i = 0; i <= geom.node_of_R(); ++i) {
        const double exact = std::cyl_bessel_i(0.0, geom.radius_at(i) / lam) / denom;
        max_rel = std::max(max_rel, std::abs(profile.b_z[i] - exact) / exact);
    }
    c.require(max_rel < 1e-6, "London profile max rel error " + num(max_rel));

    const auto fit = meissner::penetration_depth(profile, geom, 0.5, 0.95);
    c.require(fit.decay_found && std::abs(fit.lambda - lam) / lam < 0.02,
              "fitted lambda " + num(fit.lambda) + " vs " + num(lam));

    meissner::ScfConfig weak;
    weak.n_particles = 1e-3;
    weak.tol = 1e-10;
    weak.mix = 0.5;
    weak.max_iter = 200;
    meissner::CylinderGeometry scf_geom = geom;
    scf_geom.intervals_to_R = 1024;
    const auto [state, field] = meissner::scf_solve(1e-3, scf_geom, units, weak);
    c.require(state.converged && state.residual < 1e-10,
              "weak-coupling SCF residual " + num(state.residual));
    c.require(state.iterations < 200,
              "SCF took " + std::to_string(state.iterations) + " iterations");

    auto fitted_lambda = [&](double r, double n_particles, std::size_t intervals) {
        meissner::CylinderGeometry g2;
        g2.R = r;
        g2.R_max = 2.0 * r;
        g2.intervals_to_R = intervals;
        g2.height = 1.0;
        meissner::ScfConfig strong;
        strong.n_particles = n_particles;
        strong.tol = 1e-10;
        strong.mix = 0.5;
        strong.max_iter = 500;
        const auto [st, pf] = meissner::scf_solve(1e-3, g2, units, strong);
        if (!st.converged) return -1.0;
        return meissner::penetration_depth(pf, g2, 0.5 * r, 0.95 * r).lambda;
    };
    const double lam_r = fitted_lambda(1.0, 300.0, 1024);
    const double lam_2r = fitted_lambda(2.0, 1200.0, 2048);
    c.require(lam_r > 0.0 && lam_2r > 0.0, "strong-coupling SCF did not converge");
    if (lam_r > 0.0 && lam_2r > 0.0)
        c.require(std::abs(lam_2r - lam_r) / lam_r < 0.03,
                  "size sweep: lambda(R) " + num(lam_r) + " vs lambda(2R) " +
                      num(lam_2r));
    c.finish();
}

// 9. Radial eigensolver benchmarks with observed second-order convergence.
void criterion_benchmarks() {
    Criterion c{"criterion 9: free-disk and Landau-level benchmarks at O(h^2)", 20.0};
    const auto units = meissner::PhysicalUnits::dimensionless();

    auto disk_error = [&](std::size_t intervals) {
        meissner::CylinderGeometry g;
        g.R = 1.0;
        g.R_max = 2.0;
        g.intervals_to_R = intervals;
        const std::vector<double> alpha(g.node_count(), 0.0);
        const auto res = meissner::radial_ground_state(alpha, g, units);
        const double j01 = 2.404825557695772768622;
        return std::abs(2.0 * res.e0 - (j01 / g.R_max) * (j01 / g.R_max));
    };
    const double d1 = disk_error(256), d2 = disk_error(512), d4 = disk_error(1024);
    c.require(d1 / d2 > 3.5 && d1 / d2 < 4.5,
              "free disk ratio h->h/2: " + num(d1 / d2));
    c.require(d2 / d4 > 3.5 && d2 / d4 < 4.5,
              "free disk ratio h/2->h/4: " + num(d2 / d4));

    auto landau_error = [&](std::size_t intervals) {
        meissner::CylinderGeometry g;
        g.R = 6.0;
        g.R_max = 12.0;
        g.intervals_to_R = intervals;
        std::vector<double> alpha(g.node_count());
        for (std::size_t i = 0; i < alpha.size(); ++i)
            alpha[i] = 0.5 * g.radius_at(i);   // uniform B = 1
        const auto res = meissner::radial_ground_state(alpha, g, units);
        return std::abs(2.0 * res.e0 - 1.0);   // lowest Landau level
    };
    const double l1 = landau_error(256), l2 = landau_error(512);
    c.require(l1 / l2 > 3.5 && l1 / l2 < 4.5,
              "Landau level ratio h->h/2: " + num(l1 / l2));
    c.finish();
}

} // namespace

int main() {
    criterion_boosted_floor();
    criterion_ness_limit_points();
    criterion_metastability();
    criterion_landau();
    criterion_sound();
    criterion_theorem1();
    criterion_bloch();
    criterion_meissner();
    criterion_benchmarks();

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criterion(s) failed\n", g_failures);
    return 1;
}
