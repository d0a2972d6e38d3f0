#include "sflab/meissner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sflab/errors.hpp"

namespace sflab::meissner {

namespace {

// ---- symmetric tridiagonal eigen machinery ---------------------------------

// Number of eigenvalues of the symmetric tridiagonal (diag, off) below x,
// by the Sturm sequence of the LDL^T recurrence.
int sturm_count(const std::vector<double>& diag, const std::vector<double>& off,
                double x) {
    const std::size_t n = diag.size();
    int count = 0;
    double q = diag[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        if (q == 0.0) q = 1e-300;
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if (q < 0.0) ++count;
    }
    return count;
}

double smallest_eigenvalue(const std::vector<double>& diag,
                           const std::vector<double>& off) {
    const std::size_t n = diag.size();
    double lo = diag[0], hi = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) +
                         (i + 1 < n ? std::abs(off[i]) : 0.0);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    const double span = std::max({1.0, std::abs(lo), std::abs(hi)});
    for (int it = 0; it < 200 && hi - lo > 1e-15 * span; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(diag, off, mid) >= 1) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Tridiagonal solve with partial pivoting (dgtsv-style), safe near-singular.
std::vector<double> tridiag_solve_pivoted(std::vector<double> sub,
                                          std::vector<double> diag,
                                          std::vector<double> sup,
                                          std::vector<double> rhs) {
    const std::size_t n = diag.size();
    sub.resize(n, 0.0);
    sup.resize(n, 0.0);
    std::vector<double> sup2(n, 0.0);   // second superdiagonal from row swaps
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(sub[i]) > std::abs(diag[i])) {
            std::swap(diag[i], sub[i]);
            std::swap(sup[i], diag[i + 1]);
            if (i + 2 < n) sup2[i] = sup[i + 1], sup[i + 1] = 0.0;
            std::swap(rhs[i], rhs[i + 1]);
        }
        if (diag[i] == 0.0) diag[i] = 1e-300;
        const double mult = sub[i] / diag[i];
        diag[i + 1] -= mult * sup[i];
        if (i + 2 < n) sup[i + 1] -= mult * sup2[i];
        rhs[i + 1] -= mult * rhs[i];
    }
    if (diag[n - 1] == 0.0) diag[n - 1] = 1e-300;
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    if (n >= 2) x[n - 2] = (rhs[n - 2] - sup[n - 2] * x[n - 1]) / diag[n - 2];
    for (std::size_t ii = n; ii-- > 2;) {
        const std::size_t i = ii - 2;
        x[i] = (rhs[i] - sup[i] * x[i + 1] - sup2[i] * x[i + 2]) / diag[i];
    }
    return x;
}

struct TridiagEigenpair {
    double value = 0.0;
    std::vector<double> vec;
    int iterations = 0;
    bool converged = false;
};

// B_z = (rho a)'/rho from a grid vector potential. Stencils left of R avoid
// crossing the a'' kink at the sample boundary; fourth order inside, series
// expansion at the axis, exact constant outside.
std::vector<double> induction_from_potential(const std::vector<double>& a,
                                             const CylinderGeometry& g,
                                             double b_ext) {
    const std::size_t nodes = g.node_count();
    const std::size_t ir = g.node_of_R();
    const double h = g.spacing();
    std::vector<double> f(nodes), b_z(nodes, b_ext);
    for (std::size_t i = 0; i < nodes; ++i) f[i] = g.radius_at(i) * a[i];
    auto deriv = [&](std::size_t i) -> double {
        if (i >= 2 && i + 2 <= ir)
            return (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
        if (i == 1)
            return (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) /
                   (12.0 * h);
        if (i + 1 == ir)
            return (3.0 * f[i + 1] + 10.0 * f[i] - 18.0 * f[i - 1] + 6.0 * f[i - 2] -
                    f[i - 3]) / (12.0 * h);
        return (25.0 * f[i] - 48.0 * f[i - 1] + 36.0 * f[i - 2] - 16.0 * f[i - 3] +
                3.0 * f[i - 4]) / (12.0 * h);
    };
    b_z[0] = (8.0 * a[1] - a[2]) / (3.0 * h);
    for (std::size_t i = 1; i <= ir; ++i) b_z[i] = deriv(i) / g.radius_at(i);
    return b_z;
}

TridiagEigenpair smallest_eigenpair(const std::vector<double>& diag,
                                    const std::vector<double>& off) {
    const std::size_t n = diag.size();
    TridiagEigenpair out;
    out.value = smallest_eigenvalue(diag, off);

    std::vector<double> v(n, 1.0);
    double norm = std::sqrt(static_cast<double>(n));
    for (double& c : v) c /= norm;

    double rayleigh = out.value;
    for (int it = 0; it < 8; ++it) {
        ++out.iterations;
        std::vector<double> d_shift(diag);
        for (double& d : d_shift) d -= out.value;
        v = tridiag_solve_pivoted(off, d_shift, off, v);
        norm = 0.0;
        for (double c : v) norm += c * c;
        norm = std::sqrt(norm);
        for (double& c : v) c /= norm;

        // Rayleigh quotient and residual of the unshifted matrix.
        double rq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double tv = diag[i] * v[i];
            if (i > 0) tv += off[i - 1] * v[i - 1];
            if (i + 1 < n) tv += off[i] * v[i + 1];
            rq += v[i] * tv;
        }
        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double tv = diag[i] * v[i] - rq * v[i];
            if (i > 0) tv += off[i - 1] * v[i - 1];
            if (i + 1 < n) tv += off[i] * v[i + 1];
            resid = std::max(resid, std::abs(tv));
        }
        rayleigh = rq;
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            scale = std::max(scale, std::abs(diag[i]));
        if (resid <= 1e-11 * std::max(1.0, scale)) {
            out.converged = true;
            break;
        }
    }
    out.value = rayleigh;
    out.vec = std::move(v);
    return out;
}

} // namespace

std::size_t CylinderGeometry::node_count() const {
    return static_cast<std::size_t>(std::llround(R_max / spacing())) + 1;
}

void CylinderGeometry::validate() const {
    if (!(R > 0.0)) throw std::invalid_argument("cylinder radius must be positive");
    if (intervals_to_R < 4)
        throw std::invalid_argument("grid needs at least 4 intervals inside R");
    if (!(R_max >= 2.0 * R - 1e-12 * R))
        throw std::invalid_argument("R_max must be at least 2R");
    if (!(height > 0.0)) throw std::invalid_argument("cylinder height must be positive");
    const double ratio = R_max / spacing();
    if (std::abs(ratio - std::llround(ratio)) > 1e-9)
        throw std::invalid_argument("R_max must lie on the radial grid");
}

PhysicalUnits PhysicalUnits::dimensionless() { return {}; }

PhysicalUnits PhysicalUnits::si_pairs() {
    PhysicalUnits u;
    u.e = 2.0 * 1.602176634e-19;
    u.m = 2.0 * 9.1093837015e-31;
    u.mu0 = 1.25663706212e-6;
    u.hbar = 1.054571817e-34;
    u.mode = Mode::si;
    return u;
}

void PhysicalUnits::validate() const {
    if (!(e > 0.0 && m > 0.0 && mu0 > 0.0 && hbar > 0.0))
        throw std::invalid_argument("physical constants must be positive");
}

std::vector<double> effective_alpha(const FieldProfile& profile,
                                    const PhysicalUnits& units) {
    std::vector<double> alpha(profile.a.size());
    const double scale = units.e / units.hbar;
    for (std::size_t i = 0; i < alpha.size(); ++i) alpha[i] = scale * profile.a[i];
    return alpha;
}

FieldProfile vacuum_profile(double b_ext, const CylinderGeometry& g) {
    g.validate();
    FieldProfile p;
    p.b_ext = b_ext;
    const std::size_t n = g.node_count();
    p.a.resize(n);
    p.b_z.assign(n, b_ext);
    for (std::size_t i = 0; i < n; ++i) p.a[i] = 0.5 * b_ext * g.radius_at(i);
    return p;
}

RadialEigenResult radial_ground_state(const std::vector<double>& alpha,
                                      const CylinderGeometry& g,
                                      const PhysicalUnits& units,
                                      int angular_k) {
    g.validate();
    units.validate();
    const std::size_t nodes = g.node_count();
    if (alpha.size() != nodes)
        throw std::invalid_argument("alpha must be sampled on the full grid");
    const double h = g.spacing();

    // Finite-volume form: A phi = eps W phi with cell volumes W, symmetrized
    // to the standard tridiagonal problem for W^{1/2} phi.
    const std::size_t first = (angular_k == 0) ? 0 : 1;   // Dirichlet at 0 for k != 0
    const std::size_t last = nodes - 2;                   // Dirichlet at R_max
    const std::size_t n = last - first + 1;

    std::vector<double> weight(n), adiag(n), aoff(n > 0 ? n - 1 : 0);
    for (std::size_t row = 0; row < n; ++row) {
        const std::size_t i = first + row;
        const double rho = g.radius_at(i);
        const double rho_minus = rho - 0.5 * h;
        const double rho_plus = rho + 0.5 * h;
        double potential;
        if (angular_k == 0) {
            potential = alpha[i] * alpha[i];
        } else {
            const double t = static_cast<double>(angular_k) / rho + alpha[i];
            potential = t * t;
        }
        if (i == 0) {
            weight[row] = h * h / 8.0;
            adiag[row] = rho_plus / h + weight[row] * potential;
        } else {
            weight[row] = rho * h;
            adiag[row] = (rho_minus + rho_plus) / h + weight[row] * potential;
        }
        if (row + 1 < n) aoff[row] = -rho_plus / h;
    }

    std::vector<double> diag(n), off(n > 0 ? n - 1 : 0);
    for (std::size_t row = 0; row < n; ++row) diag[row] = adiag[row] / weight[row];
    for (std::size_t row = 0; row + 1 < n; ++row)
        off[row] = aoff[row] / std::sqrt(weight[row] * weight[row + 1]);

    TridiagEigenpair pair = smallest_eigenpair(diag, off);
    if (!pair.converged)
        throw ConvergenceError("radial eigensolve failed to converge after " +
                               std::to_string(pair.iterations) +
                               " inverse iterations (k = " +
                               std::to_string(angular_k) + ")");

    RadialEigenResult result;
    result.iterations = pair.iterations;
    result.converged = true;
    result.e0 = units.hbar * units.hbar / (2.0 * units.m) * pair.value;

    result.phi.assign(nodes, 0.0);
    double norm2 = 0.0;
    for (std::size_t row = 0; row < n; ++row) {
        const double phi = pair.vec[row] / std::sqrt(weight[row]);
        result.phi[first + row] = phi;
        norm2 += weight[row] * phi * phi;
    }
    double sign_sum = 0.0;
    for (double p : result.phi) sign_sum += p;
    const double scale = (sign_sum < 0.0 ? -1.0 : 1.0) / std::sqrt(norm2);
    for (double& p : result.phi) p *= scale;
    return result;
}

FieldProfile maxwell_update(const std::vector<double>& density, double b_ext,
                            const CylinderGeometry& g, const PhysicalUnits& units) {
    g.validate();
    units.validate();
    const std::size_t nodes = g.node_count();
    if (density.size() < g.node_of_R() + 1)
        throw std::invalid_argument("density must cover the grid up to R");
    for (std::size_t i = 0; i <= g.node_of_R(); ++i)
        if (density[i] < 0.0)
            throw std::invalid_argument("density must be nonnegative");

    const double h = g.spacing();
    const double big_r = g.R;
    const std::size_t ir = g.node_of_R();
    const double coupling = units.mu0 * units.e * units.e / units.m;

    // Substituting u = a/rho turns the equation into (rho^3 u')' = rho^3 g u
    // with u smooth and even at the axis; the finite-volume scheme is then
    // exact on both leading series terms (1 and rho^2), which keeps the
    // relative error uniform down to rho = 0. The induction continuity
    // B_z(R) = 2u + R u' = B_ext eliminates the ghost node. One Richardson
    // step (h and h/2) removes the leading h^2 error, which otherwise
    // accumulates over the many e-folds of screening decay.
    auto cube = [](double x) { return x * x * x; };
    auto density_fine = [&](std::size_t j, int f) -> double {
        if (f == 1 || j % 2 == 0) return density[j / static_cast<std::size_t>(f)];
        const std::size_t i = j / 2;   // midpoint of coarse cells i, i+1
        if (i == 0)
            return (3.0 * density[0] + 6.0 * density[1] - density[2]) / 8.0;
        if (i + 1 == ir)
            return (3.0 * density[ir] + 6.0 * density[ir - 1] - density[ir - 2]) / 8.0;
        return (-density[i - 1] + 9.0 * density[i] + 9.0 * density[i + 1] -
                density[i + 2]) / 16.0;
    };
    // Solver convention: sub[j] couples equation j+1 to unknown j.
    auto solve_u = [&](int f) -> std::vector<double> {
        const double hf = h / f;
        const std::size_t irf = ir * static_cast<std::size_t>(f);
        const std::size_t n = irf + 1;
        std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
        for (std::size_t i = 0; i <= irf; ++i) {
            const double rho = hf * static_cast<double>(i);
            const double flux_minus = (i == 0) ? 0.0 : cube(rho - 0.5 * hf);
            const double flux_plus = cube(rho + 0.5 * hf);
            const double lo = std::max(rho - 0.5 * hf, 0.0);
            const double hi = rho + 0.5 * hf;
            const double vol = (hi * hi * hi * hi - lo * lo * lo * lo) / 4.0;
            const double gcoef = coupling * density_fine(i, f);
            if (i < irf) {
                if (i > 0) sub[i - 1] = -flux_minus / (hf * vol);
                sup[i] = -flux_plus / (hf * vol);
                diag[i] = (flux_minus + flux_plus) / (hf * vol) + gcoef;
            } else {
                // ghost: u_G = u_{irf-1} + (2 hf / R)(B_ext - 2 u_irf)
                sub[i - 1] = -(flux_minus + flux_plus) / (hf * vol);
                diag[i] = (flux_minus + flux_plus * (1.0 + 4.0 * hf / big_r)) /
                              (hf * vol) +
                          gcoef;
                rhs[i] = 2.0 * flux_plus * b_ext / (big_r * vol);
            }
        }
        return tridiag_solve_pivoted(sub, diag, sup, rhs);
    };

    const std::vector<double> u_coarse = solve_u(1);
    const std::vector<double> u_fine = solve_u(2);
    std::vector<double> u(ir + 1);
    for (std::size_t i = 0; i <= ir; ++i)
        u[i] = (4.0 * u_fine[2 * i] - u_coarse[i]) / 3.0;

    FieldProfile profile;
    profile.b_ext = b_ext;
    profile.a.assign(nodes, 0.0);
    for (std::size_t i = 0; i <= ir; ++i) profile.a[i] = g.radius_at(i) * u[i];
    // Exterior: B_z = B_ext exactly; the 1/rho dipole keeps a continuous at R.
    const double dipole = big_r * profile.a[ir] - 0.5 * b_ext * big_r * big_r;
    for (std::size_t i = ir + 1; i < nodes; ++i) {
        const double rho = g.radius_at(i);
        profile.a[i] = 0.5 * b_ext * rho + dipole / rho;
    }

    // B_z = 2u + rho u' from the smooth even u; stencils never cross the
    // boundary kink, fourth order, even extension across the axis.
    profile.b_z.assign(nodes, b_ext);
    auto u_at = [&](long i) { return u[static_cast<std::size_t>(std::labs(i))]; };
    auto du = [&](std::size_t i) -> double {
        const long li = static_cast<long>(i);
        if (i + 2 <= ir)
            return (-u_at(li + 2) + 8.0 * u_at(li + 1) - 8.0 * u_at(li - 1) +
                    u_at(li - 2)) / (12.0 * h);
        if (i + 1 == ir)
            return (3.0 * u[i + 1] + 10.0 * u[i] - 18.0 * u[i - 1] + 6.0 * u[i - 2] -
                    u[i - 3]) / (12.0 * h);
        return (25.0 * u[i] - 48.0 * u[i - 1] + 36.0 * u[i - 2] - 16.0 * u[i - 3] +
                3.0 * u[i - 4]) / (12.0 * h);
    };
    profile.b_z[0] = 2.0 * u[0];
    for (std::size_t i = 1; i <= ir; ++i)
        profile.b_z[i] = 2.0 * u[i] + g.radius_at(i) * du(i);
    return profile;
}

std::pair<ScfState, FieldProfile> scf_solve(double b_ext,
                                            const CylinderGeometry& g,
                                            const PhysicalUnits& units,
                                            const ScfConfig& config) {
    g.validate();
    units.validate();
    if (!(b_ext > 0.0))
        throw std::invalid_argument("scf_solve requires B_ext > 0");
    if (!(config.mix > 0.0 && config.mix <= 1.0))
        throw std::invalid_argument("mixing parameter must lie in (0, 1]");
    if (config.max_iter < 1)
        throw std::invalid_argument("max_iter must be >= 1");

    const std::size_t nodes = g.node_count();
    ScfState state;
    FieldProfile profile;
    if (config.frozen_density) {
        if (config.frozen_density->size() < g.node_of_R() + 1)
            throw std::invalid_argument("frozen density must cover the grid up to R");
        profile = maxwell_update(*config.frozen_density, b_ext, g, units);
    } else {
        profile = vacuum_profile(b_ext, g);
    }

    const double density_norm = config.n_particles /
                                (2.0 * 3.1415926535897932384626433832795 * g.height);
    for (int it = 1; it <= config.max_iter; ++it) {
        const std::vector<double> alpha = effective_alpha(profile, units);
        const RadialEigenResult eig = radial_ground_state(alpha, g, units, 0);
        state.phi0 = eig.phi;
        state.e0 = eig.e0;
        if (config.frozen_density) {
            state.density = *config.frozen_density;
            state.density.resize(nodes, 0.0);
        } else {
            state.density.assign(nodes, 0.0);
            for (std::size_t i = 0; i < nodes; ++i)
                state.density[i] = density_norm * eig.phi[i] * eig.phi[i];
        }

        const FieldProfile updated = maxwell_update(state.density, b_ext, g, units);
        double residual = 0.0;
        for (std::size_t i = 0; i < nodes; ++i)
            residual = std::max(residual, std::abs(updated.a[i] - profile.a[i]));

        state.iterations = it;
        state.residual = residual;
        state.residual_history.push_back(residual);
        if (residual < config.tol) {
            profile = updated;
            state.converged = true;
            break;
        }
        for (std::size_t i = 0; i < nodes; ++i)
            profile.a[i] = (1.0 - config.mix) * profile.a[i] + config.mix * updated.a[i];
        profile.b_z = induction_from_potential(profile.a, g, b_ext);
    }

    if (config.k_sector_diagnostic) {
        const std::vector<double> alpha = effective_alpha(profile, units);
        state.e0_k1 = radial_ground_state(alpha, g, units, 1).e0;
    }
    return {state, profile};
}

PenetrationFit penetration_depth(const FieldProfile& profile,
                                 const CylinderGeometry& g,
                                 double fit_min, double fit_max) {
    g.validate();
    if (!(fit_min < fit_max) || fit_min < 0.0 || fit_max > g.R)
        throw std::invalid_argument("fit region must satisfy 0 <= fit_min < fit_max <= R");

    PenetrationFit fit;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i <= g.node_of_R(); ++i) {
        const double rho = g.radius_at(i);
        if (rho < fit_min || rho > fit_max || rho == 0.0) continue;
        const double b = profile.b_z[i];
        if (!(b > 0.0)) {
            ++fit.points_excluded;
            continue;
        }
        xs.push_back(g.R - rho);
        ys.push_back(std::log(b * std::sqrt(rho / g.R)));
    }
    if (xs.size() < 3)
        throw std::invalid_argument("penetration fit region holds fewer than 3 usable samples");
    fit.points_used = xs.size();

    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i]; sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    const double intercept = (sy - slope * sx) / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - intercept - slope * xs[i];
        ss_res += r * r;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;

    // No decay on the sample scale (uniform or nearly uniform induction):
    // the sqrt(rho) prefactor alone produces a spurious slope of order 1/R,
    // so anything with fitted lambda >= R is reported as non-decaying.
    if (slope >= -1e-12 || -1.0 / slope >= g.R) {
        fit.decay_found = false;
        fit.lambda = std::numeric_limits<double>::infinity();
    } else {
        fit.decay_found = true;
        fit.lambda = -1.0 / slope;
    }
    return fit;
}

double london_depth(double n0, const PhysicalUnits& units) {
    if (!(n0 > 0.0)) throw std::invalid_argument("density must be positive");
    return std::sqrt(units.m / (units.mu0 * units.e * units.e * n0));
}

} // namespace sflab::meissner
