#include "sflab/girardeau.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sflab/errors.hpp"

namespace sflab::girardeau {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

void require_girardeau(const SystemGeometry& g) {
    g.validate();
    if (g.particle_count % 2 == 0)
        throw std::invalid_argument("Girardeau runs require odd N, got " +
                                    std::to_string(g.particle_count));
    if (std::abs(g.mass - 0.5) > 1e-15)
        throw std::invalid_argument("Girardeau spectra are computed with m = 1/2");
}

long half_width(const SystemGeometry& g) { return (g.particle_count - 1) / 2; }

// sum_{n=-h}^{h} n^2
std::int64_t sea_energy_sum(long h) { return h * (h + 1) * (2 * h + 1) / 3; }

std::uint64_t saturating_binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() / 2;
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        if (result > cap / (n - k + i)) return cap;
        result = result * (n - k + i) / i;
    }
    return result;
}

struct BudgetCounter {
    std::uint64_t used = 0;
    std::uint64_t cap = 0;
    void tick(std::uint64_t n = 1) {
        used += n;
        if (used > cap)
            throw BudgetError("enumeration budget of " + std::to_string(cap) +
                              " configurations exceeded");
    }
};

} // namespace

void MetastabilityWindow::validate() const {
    if (!(energy_cutoff > 0.0) || !(momentum_cutoff > 0.0))
        throw std::invalid_argument("metastability window cutoffs must be positive");
}

MetastabilityWindow MetastabilityWindow::proposition_defaults(double rho) {
    return {2.0 * (kPi * rho) * (kPi * rho), kPi * rho};
}

DispersionConvention parse_convention(const std::string& name) {
    if (name == "paper") return DispersionConvention::paper;
    if (name == "m-half" || name == "m_half") return DispersionConvention::m_half;
    throw ConfigError("unknown dispersion convention '" + name + "' (expected paper|m-half)");
}

const char* convention_name(DispersionConvention c) {
    return c == DispersionConvention::paper ? "paper" : "m-half";
}

FermiConfig ground_config(const SystemGeometry& g) {
    require_girardeau(g);
    const long h = half_width(g);
    FermiConfig c;
    c.geometry = g;
    c.occupied.reserve(g.particle_count);
    for (long n = -h; n <= h; ++n) c.occupied.push_back(n);
    return c;
}

double fermi_momentum(const SystemGeometry& g) {
    return kPi * (g.particle_count - 1) / g.box_length;
}

std::int64_t index_energy_sum(const FermiConfig& c) {
    std::int64_t e = 0;
    for (long n : c.occupied) e += static_cast<std::int64_t>(n) * n;
    return e;
}

std::int64_t index_momentum_sum(const FermiConfig& c) {
    std::int64_t p = 0;
    for (long n : c.occupied) p += n;
    return p;
}

double energy(const FermiConfig& c) {
    const double s = c.geometry.spacing();
    return s * s * static_cast<double>(index_energy_sum(c));
}

double momentum(const FermiConfig& c) {
    return c.geometry.spacing() * static_cast<double>(index_momentum_sum(c));
}

double ground_energy_closed_form(int particle_count, double box_length) {
    const long h = (particle_count - 1) / 2;
    const double s = lattice::kTwoPi / box_length;
    return s * s * static_cast<double>(sea_energy_sum(h));
}

SpectrumPoint boosted_point(const FermiConfig& c, double v) {
    require_girardeau(c.geometry);
    const long w = lattice::velocity_index(v, c.geometry.box_length);
    const double s = c.geometry.spacing();
    const std::int64_t de = index_energy_sum(c) - sea_energy_sum(half_width(c.geometry));
    const std::int64_t p = index_momentum_sum(c);
    return {s * s * static_cast<double>(de + w * p), s * static_cast<double>(p)};
}

double type1_dispersion(double k, double k_fermi, DispersionConvention conv) {
    switch (conv) {
        case DispersionConvention::paper:  return k * k / 2.0 + k_fermi * std::abs(k);
        case DispersionConvention::m_half: return k * k + 2.0 * k_fermi * std::abs(k);
    }
    throw std::invalid_argument("unknown dispersion convention");
}

FermiConfig galilean_shifted_sea(const SystemGeometry& g, long shift) {
    FermiConfig c = ground_config(g);
    for (long& n : c.occupied) n += shift;
    return c;
}

UmklappLadder umklapp_ladder(int rungs, double v, const SystemGeometry& g) {
    require_girardeau(g);
    if (rungs < 1)
        throw std::invalid_argument("umklapp ladder needs r >= 1");
    if (rungs > g.particle_count)
        throw std::invalid_argument("umklapp ladder of " + std::to_string(rungs) +
                                    " rungs exceeds the " +
                                    std::to_string(g.particle_count) + "-particle sea");
    const long w = lattice::velocity_index(v, g.box_length);
    const long h = half_width(g);

    UmklappLadder ladder;
    ladder.rungs = rungs;
    std::int64_t de = 0;
    std::int64_t dp = 0;
    for (int i = 1; i <= rungs; ++i) {
        const long from = h - (i - 1);
        const long to = -h - i;
        ladder.moves.emplace_back(from, to);
        de += static_cast<std::int64_t>(to) * to - static_cast<std::int64_t>(from) * from;
        dp += to - from;   // every rung carries -(2h+1), i.e. -2k_F - 2*pi/L
    }
    const double s = g.spacing();
    ladder.e_total = s * s * static_cast<double>(de + w * dp);
    return ladder;
}

long sufficient_window(const SystemGeometry& g, double v) {
    const double steps = std::abs(v) * g.box_length / lattice::kTwoPi;
    return static_cast<long>(std::ceil(steps - 1e-9)) + half_width(g);
}

std::uint64_t bruteforce_cost(const SystemGeometry& g, long window) {
    return saturating_binomial(static_cast<std::uint64_t>(2 * window + 1),
                               static_cast<std::uint64_t>(g.particle_count));
}

double bruteforce_min(const SystemGeometry& g, double v, long window,
                      const EnumerationBudget& budget) {
    require_girardeau(g);
    const long h = half_width(g);
    if (window < h)
        throw std::invalid_argument("bruteforce window must cover the Fermi sea");
    const long w = lattice::velocity_index(v, g.box_length);

    const std::uint64_t cost = bruteforce_cost(g, window);
    if (cost > budget.max_configs)
        throw BudgetError("bruteforce_min would enumerate " + std::to_string(cost) +
                          " configurations, above the budget of " +
                          std::to_string(budget.max_configs));

    const int n_particles = g.particle_count;
    const std::int64_t e0 = sea_energy_sum(h);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();

    // Exhaustive scan of all index subsets of [-window, window]; deliberately
    // no pruning, this is the oracle other routes are judged against.
    auto dfs = [&](auto&& self, int pos, long start, std::int64_t partial) -> void {
        if (pos == n_particles) {
            best = std::min(best, partial);
            return;
        }
        for (long n = start; n <= window - (n_particles - 1 - pos); ++n) {
            const std::int64_t contrib =
                static_cast<std::int64_t>(n) * n + static_cast<std::int64_t>(w) * n;
            self(self, pos + 1, n + 1, partial + contrib);
        }
    };
    dfs(dfs, 0, -window, 0);

    const double s = g.spacing();
    return s * s * static_cast<double>(best - e0);
}

namespace {

struct WindowLimits {
    std::int64_t de_max = 0;   // (E - E0)/s^2 cutoff
    std::int64_t p_max = 0;    // |P|/s cutoff
};

WindowLimits window_limits(const SystemGeometry& g, const MetastabilityWindow& w) {
    const double s = g.spacing();
    WindowLimits lim;
    lim.de_max = static_cast<std::int64_t>(std::floor(w.energy_cutoff / (s * s) + 1e-9));
    lim.p_max = static_cast<std::int64_t>(std::floor(w.momentum_cutoff / s + 1e-9));
    return lim;
}

} // namespace

std::vector<WindowState> window_states(const SystemGeometry& g,
                                       const MetastabilityWindow& w,
                                       const EnumerationBudget& budget) {
    require_girardeau(g);
    w.validate();
    const long h = half_width(g);
    const WindowLimits lim = window_limits(g, w);
    const std::int64_t e0 = sea_energy_sum(h);

    BudgetCounter counter{0, budget.max_configs};
    std::vector<WindowState> states;
    states.push_back({0, 0});   // the Fermi sea itself
    counter.tick();
    if (lim.de_max <= 0) return states;

    // Particle candidates outside the sea, sorted by increasing energy.
    // Any occupied index obeys n^2 <= E0 + c, which bounds the candidate set.
    const long reach =
        static_cast<long>(std::floor(std::sqrt(static_cast<double>(e0 + lim.de_max)) + 1e-9));
    std::vector<long> slots;
    for (long m = h + 1; m <= reach; ++m) {
        slots.push_back(m);
        slots.push_back(-m);
    }
    const std::size_t n_slots = slots.size();
    // suffix_min[i][r]: least energy of r particles drawn from slots[i..].
    // slots are energy-sorted, so that is just the next r entries.
    std::vector<std::int64_t> slot_energy(n_slots);
    for (std::size_t i = 0; i < n_slots; ++i)
        slot_energy[i] = static_cast<std::int64_t>(slots[i]) * slots[i];

    // Choose n_holes particle slots; `de_so_far` already accounts for the
    // energy released by the holes, so the config energy is de_so_far plus
    // the placed slot energies.
    auto place_particles = [&](auto&& self, std::size_t from, int remaining,
                               std::int64_t de_so_far, std::int64_t p_partial) -> void {
        if (remaining == 0) {
            counter.tick();
            if (std::llabs(p_partial) <= lim.p_max)
                states.push_back({de_so_far, p_partial});
            return;
        }
        for (std::size_t i = from; i + remaining <= n_slots; ++i) {
            std::int64_t min_completion = 0;
            for (int r = 0; r < remaining; ++r) min_completion += slot_energy[i + r];
            if (de_so_far + min_completion > lim.de_max) break;   // slots energy-sorted
            self(self, i + 1, remaining - 1, de_so_far + slot_energy[i],
                 p_partial + slots[i]);
        }
    };

    auto choose_holes = [&](auto&& self, long next, std::int64_t released,
                            std::int64_t p_holes, int n_holes) -> void {
        if (n_holes > 0)
            place_particles(place_particles, 0, n_holes, -released, -p_holes);
        for (long n = next; n <= h; ++n)
            self(self, n + 1,
                 released + static_cast<std::int64_t>(n) * n, p_holes + n, n_holes + 1);
    };
    choose_holes(choose_holes, -h, 0, 0, 0);

    return states;
}

std::vector<SpectrumPoint> enumerate_window(const SystemGeometry& g,
                                            const MetastabilityWindow& w,
                                            const EnumerationBudget& budget) {
    const double s = g.spacing();
    std::vector<SpectrumPoint> points;
    for (const WindowState& st : window_states(g, w, budget))
        points.push_back({s * s * static_cast<double>(st.de), s * static_cast<double>(st.p)});
    return points;
}

std::vector<WindowState> edge_type1_states(const SystemGeometry& g,
                                           const MetastabilityWindow& w,
                                           const EnumerationBudget& budget) {
    require_girardeau(g);
    w.validate();
    const long h = half_width(g);
    const int n_particles = g.particle_count;
    const WindowLimits lim = window_limits(g, w);
    BudgetCounter counter{0, budget.max_configs};

    struct SideState {
        std::int64_t de;
        std::int64_t p;
        int moves;
    };

    // One side of the sea: peel particles off the edge (holes contiguous at
    // the boundary) and park them outside on the same side. `side` = +1 for
    // the top edge, -1 for the bottom.
    auto side_options = [&](int side) {
        std::vector<SideState> opts;
        opts.push_back({0, 0, 0});
        // depth t (0-based): the move vacates |index| h-t and the particle
        // magnitudes are strictly increasing, so move costs grow with depth
        // and the energy cutoff terminates the recursion.
        auto dfs = [&](auto&& self, int depth, long min_mag, std::int64_t de,
                       std::int64_t p) -> void {
            if (depth >= n_particles) return;
            const long vacated = h - depth;
            for (long mag = min_mag;; ++mag) {
                const std::int64_t cost =
                    static_cast<std::int64_t>(mag) * mag -
                    static_cast<std::int64_t>(vacated) * vacated;
                const std::int64_t de_next = de + cost;
                if (de_next > lim.de_max) break;
                const std::int64_t p_next = p + side * (mag - vacated);
                counter.tick();
                opts.push_back({de_next, p_next, depth + 1});
                self(self, depth + 1, mag + 1, de_next, p_next);
            }
        };
        dfs(dfs, 0, h + 1, 0, 0);
        return opts;
    };

    const std::vector<SideState> top = side_options(+1);
    const std::vector<SideState> bottom = side_options(-1);

    std::vector<WindowState> states;
    for (const SideState& t : top) {
        for (const SideState& b : bottom) {
            if (t.moves + b.moves > n_particles) continue;   // edge blocks overlap
            const std::int64_t de = t.de + b.de;
            if (de > lim.de_max) continue;
            const std::int64_t p = t.p + b.p;
            counter.tick();
            if (std::llabs(p) <= lim.p_max) states.push_back({de, p});
        }
    }
    return states;
}

MetastabilityReport metastability_check(const SystemGeometry& g, double v,
                                        const MetastabilityWindow& w,
                                        double tol,
                                        const EnumerationBudget& budget) {
    const long wv = lattice::velocity_index(v, g.box_length);
    const double s = g.spacing();
    const double s2 = s * s;

    MetastabilityReport report;
    const std::vector<WindowState> full = window_states(g, w, budget);
    const std::vector<WindowState> subspace = edge_type1_states(g, w, budget);
    report.window_count = full.size();
    report.subspace_count = subspace.size();
    if (full.empty()) {
        report.empty_window = true;
        return report;
    }

    auto boosted = [&](const WindowState& st) { return st.de + wv * st.p; };

    std::int64_t window_min = std::numeric_limits<std::int64_t>::max();
    for (const WindowState& st : full) window_min = std::min(window_min, boosted(st));
    report.window_min_lambda = s2 * static_cast<double>(window_min);
    report.window_all_nonneg = report.window_min_lambda >= -tol;

    std::int64_t sub_min = std::numeric_limits<std::int64_t>::max();
    bool positive_seen = false;
    for (const WindowState& st : subspace) {
        const std::int64_t lam = boosted(st);
        sub_min = std::min(sub_min, lam);
        positive_seen = positive_seen || lam > 0;
    }
    report.min_lambda = s2 * static_cast<double>(sub_min);
    report.all_nonneg = report.min_lambda >= -tol;
    report.nontrivial = positive_seen;
    return report;
}

NessLimitPoints ness_limit_points(double rho, double v, int j_max) {
    if (!(rho > 0.0)) throw std::invalid_argument("density must be positive");
    if (j_max < 1) throw std::invalid_argument("j_max must be >= 1");
    NessLimitPoints result;
    const double k_fermi = kPi * rho;
    for (int j = 1; j <= j_max; ++j)
        result.lambda.push_back(-2.0 * k_fermi * v * static_cast<double>(j));
    result.within_proposition_window = std::abs(v) > 0.0 && std::abs(v) < 2.0 * kPi * rho;
    return result;
}

DispersionCurve type1_curve(double k_fermi, DispersionConvention conv,
                            int n_samples, double k_max) {
    if (n_samples < 1 || !(k_max > 0.0))
        throw std::invalid_argument("type1_curve: need n_samples >= 1 and k_max > 0");
    DispersionCurve curve;
    curve.slope_at_zero = (conv == DispersionConvention::paper) ? k_fermi : 2.0 * k_fermi;
    for (int i = 1; i <= n_samples; ++i) {
        const double k = k_max * static_cast<double>(i) / n_samples;
        curve.samples.emplace_back(k, type1_dispersion(k, k_fermi, conv));
    }
    return curve;
}

DispersionCurve free_particle_curve(int n_samples, double k_max) {
    if (n_samples < 1 || !(k_max > 0.0))
        throw std::invalid_argument("free_particle_curve: need n_samples >= 1 and k_max > 0");
    DispersionCurve curve;
    curve.slope_at_zero = 0.0;
    for (int i = 1; i <= n_samples; ++i) {
        const double k = k_max * static_cast<double>(i) / n_samples;
        curve.samples.emplace_back(k, k * k);
    }
    return curve;
}

double landau_velocity(const DispersionCurve& curve) {
    if (curve.samples.empty())
        throw std::invalid_argument("landau_velocity: empty dispersion curve");
    double vc = curve.slope_at_zero;
    for (const auto& [k, eps] : curve.samples) {
        if (k == 0.0)
            throw std::invalid_argument("landau_velocity: samples must have k != 0");
        vc = std::min(vc, eps / std::abs(k));
    }
    return vc;
}

SoundSpeedReport sound_speed_and_compressibility(const SystemGeometry& g) {
    require_girardeau(g);
    const double rho = g.density();
    const double L = g.box_length;
    const long h = half_width(g);
    // E0 = A / L^2 with A = 4*pi^2 * h(h+1)(2h+1)/3 (exact closed form).
    const double a_coeff =
        4.0 * kPi * kPi * static_cast<double>(sea_energy_sum(h));

    SoundSpeedReport report;
    report.c_s_dispersion = 2.0 * kPi * rho;            // m-half type-1 slope
    report.pressure = 2.0 * a_coeff / (L * L * L);      // -dE0/dL
    report.stiffness = 6.0 * a_coeff / (L * L * L);     // -L d/dL (-dE0/dL)
    report.c_s_thermo = std::sqrt(report.stiffness / (g.mass * rho));
    report.stiffness_free_boson = 6.0 * g.particle_count / (L * L * L);
    return report;
}

LinearFit extrapolate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("extrapolate: need at least 3 points");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].first > points[i - 1].first))
            throw std::invalid_argument("extrapolate: L values must be strictly increasing");

    // Normal equations for value = a + b * x with x = 1/L.
    double sx = 0, sxx = 0, sy = 0, sxy = 0;
    const double n = static_cast<double>(points.size());
    for (const auto& [L, y] : points) {
        const double x = 1.0 / L;
        sx += x; sxx += x * x; sy += y; sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-14 * n * sxx)
        throw std::invalid_argument("extrapolate: degenerate fit (L values too close)");

    LinearFit fit;
    fit.limit = (sxx * sy - sx * sxy) / det;
    fit.rate = (n * sxy - sx * sy) / det;
    for (const auto& [L, y] : points)
        fit.max_residual = std::max(fit.max_residual,
                                    std::abs(y - fit.limit - fit.rate / L));
    return fit;
}

} // namespace sflab::girardeau
