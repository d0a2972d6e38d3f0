#include "sflab/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "sflab/errors.hpp"
#include "sflab/girardeau.hpp"
#include "sflab/kms.hpp"
#include "sflab/lattice.hpp"
#include "sflab/meissner.hpp"
#include "sflab/report.hpp"

namespace sflab::cli {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

std::string join_path(const std::string& dir, const std::string& file) {
    if (dir.empty() || dir == ".") return file;
    return dir.back() == '/' ? dir + file : dir + "/" + file;
}

std::string flag(bool b) { return b ? "1" : "0"; }

girardeau::EnumerationBudget budget_from(const Config& c) {
    girardeau::EnumerationBudget b;
    if (c.has("budget"))
        b.max_configs = static_cast<std::uint64_t>(c.get_double("budget"));
    return b;
}

// ---- girardeau-side subcommands --------------------------------------------

void run_spectrum(const ValidatedConfig& vc, RunManifest& manifest,
                  const std::string& out_dir) {
    const Config& c = vc.config;
    lattice::SystemGeometry g{c.get_double("L"), c.get_int("N")};
    const double v = c.get_double("v-applied");
    const girardeau::MetastabilityWindow window{c.get_double("c"), c.get_double("d")};
    const auto states = girardeau::window_states(g, window, budget_from(c));
    const long w = lattice::velocity_index(v, g.box_length);
    const double s = g.spacing();

    CsvTable table;
    table.header = {"lambda", "k", "N", "L", "v", "convention", "dE"};
    for (const auto& st : states)
        table.add_row({fmt_num(s * s * static_cast<double>(st.de + w * st.p)),
                       fmt_num(s * static_cast<double>(st.p)),
                       std::to_string(g.particle_count), fmt_num(g.box_length),
                       fmt_num(v), "m-half",
                       fmt_num(s * s * static_cast<double>(st.de))});
    const std::string path = join_path(out_dir, "spectrum.csv");
    table.write(path);
    manifest.outputs.push_back(path);
    manifest.notes.emplace_back("states", std::to_string(states.size()));
}

void run_umklapp(const ValidatedConfig& vc, RunManifest& manifest,
                 const std::string& out_dir) {
    const Config& c = vc.config;
    lattice::SystemGeometry g{c.get_double("L"), c.get_int("N")};
    const double v = c.get_double("v-applied");
    const int r_max = c.get_int("r-max");
    const double rho_eff = g.density();

    CsvTable table;
    table.header = {"r", "e_total", "lambda_j", "residual", "N", "L", "v"};
    for (int r = 1; r <= r_max; ++r) {
        const auto ladder = girardeau::umklapp_ladder(r, v, g);
        const double lambda_j = -2.0 * kPi * rho_eff * v * r;
        table.add_row({std::to_string(r), fmt_num(ladder.e_total), fmt_num(lambda_j),
                       fmt_num(ladder.e_total - lambda_j),
                       std::to_string(g.particle_count), fmt_num(g.box_length),
                       fmt_num(v)});
    }
    const std::string path = join_path(out_dir, "umklapp.csv");
    table.write(path);
    manifest.outputs.push_back(path);

    // Both closed-form rung counts: r = [Lv/2pi] (the m=1 reading, which
    // lands back at lambda = 0 here) and the m-half minimizer r = [Lv/4pi].
    const int r_paper = static_cast<int>(std::floor(std::abs(v) * g.box_length / (2.0 * kPi)));
    const int r_min = static_cast<int>(std::floor(std::abs(v) * g.box_length / (4.0 * kPi)));
    manifest.notes.emplace_back("r_paper", std::to_string(r_paper));
    manifest.notes.emplace_back("r_mhalf_minimizer", std::to_string(r_min));
}

void run_ness(const ValidatedConfig& vc, RunManifest& manifest,
              const std::string& out_dir) {
    const Config& c = vc.config;
    const double rho = c.get_double("rho");
    const double v_target = c.get_double("v");
    const int j_max = c.get_int("j");
    const auto [m_lo, m_hi] = c.get_range("L-sweep");
    if (m_lo < 1) throw ConfigError("L-sweep must start at M >= 1");

    CsvTable rows;
    rows.header = {"j", "M", "L", "N", "v_applied", "e_total", "lambda_j", "residual"};
    CsvTable fits;
    fits.header = {"j", "limit", "rate", "max_fit_residual", "lambda_j", "rel_err",
                   "within_window"};

    const auto limits = girardeau::ness_limit_points(rho, v_target, j_max);
    for (int j = 1; j <= j_max; ++j) {
        std::vector<std::pair<double, double>> series;
        for (int m = m_lo; m <= m_hi; ++m) {
            const double box = 2.0 * kPi * m;
            const int n = lattice::nearest_odd_count(rho, box);
            if (j > n) continue;
            lattice::SystemGeometry g{box, n};
            const auto spec = lattice::prescription(v_target, {box});
            const auto ladder = girardeau::umklapp_ladder(j, spec.v_lattice, g);
            const double lambda_j = limits.lambda[static_cast<std::size_t>(j - 1)];
            series.emplace_back(box, ladder.e_total);
            rows.add_row({std::to_string(j), std::to_string(m), fmt_num(box),
                          std::to_string(n), fmt_num(spec.v_lattice),
                          fmt_num(ladder.e_total), fmt_num(lambda_j),
                          fmt_num(ladder.e_total - lambda_j)});
        }
        const auto fit = girardeau::extrapolate(series);
        const double lambda_j = limits.lambda[static_cast<std::size_t>(j - 1)];
        const double rel = std::abs(fit.limit - lambda_j) / std::abs(lambda_j);
        fits.add_row({std::to_string(j), fmt_num(fit.limit), fmt_num(fit.rate),
                      fmt_num(fit.max_residual), fmt_num(lambda_j), fmt_num(rel),
                      flag(limits.within_proposition_window)});
    }
    const std::string rows_path = join_path(out_dir, "ness.csv");
    const std::string fits_path = join_path(out_dir, "ness_fit.csv");
    rows.write(rows_path);
    fits.write(fits_path);
    manifest.outputs.push_back(rows_path);
    manifest.outputs.push_back(fits_path);
    if (!limits.within_proposition_window)
        manifest.notes.emplace_back("proposition_window",
                                    "v outside 0 < |v| < 2*pi*rho; values unverified");
}

void run_metastability(const ValidatedConfig& vc, RunManifest& manifest,
                       const std::string& out_dir) {
    const Config& c = vc.config;
    const double rho = c.get_double("rho");
    const int n_max = c.get_int("N-max");
    const double v_max = c.get_double("v-max");
    const girardeau::MetastabilityWindow window{c.get_double("c"), c.get_double("d")};
    const double tol = c.get_double("tol");
    const auto budget = budget_from(c);

    CsvTable table;
    table.header = {"N", "L", "v", "all_nonneg", "min_lambda", "nontrivial",
                    "window_all_nonneg", "window_min_lambda", "subspace_states",
                    "window_states"};
    for (int n = 3; n <= n_max; n += 2) {
        lattice::SystemGeometry g{n / rho, n};
        const double s = g.spacing();
        const long w_hi = static_cast<long>(std::floor(v_max / s - 1e-9));
        for (long w = 0; w <= w_hi; ++w) {
            const double v = s * static_cast<double>(w);
            const auto report = girardeau::metastability_check(g, v, window, tol, budget);
            table.add_row({std::to_string(n), fmt_num(g.box_length), fmt_num(v),
                           flag(report.all_nonneg), fmt_num(report.min_lambda),
                           flag(report.nontrivial), flag(report.window_all_nonneg),
                           fmt_num(report.window_min_lambda),
                           std::to_string(report.subspace_count),
                           std::to_string(report.window_count)});
        }
    }
    const std::string path = join_path(out_dir, "metastability.csv");
    table.write(path);
    manifest.outputs.push_back(path);
    manifest.notes.emplace_back(
        "semantics",
        "all_nonneg/min_lambda follow the Definition-3 subspace (multi type-1 edge "
        "excitations); window_* columns report the full windowed spectrum");
}

void run_landau(const ValidatedConfig& vc, RunManifest& manifest,
                const std::string& out_dir) {
    const Config& c = vc.config;
    const double rho = c.get_double("rho");
    const double k_fermi = kPi * rho;
    const double k_max = c.get_double("k-max");
    const int samples = c.get_int("samples");
    const std::string requested = c.get("convention");

    CsvTable table;
    table.header = {"dispersion", "convention", "k_F", "v_c", "sampled_min_ratio",
                    "slope_at_zero"};
    auto add_curve = [&](const std::string& name, const girardeau::DispersionCurve& curve,
                         const std::string& conv) {
        double sampled = std::numeric_limits<double>::infinity();
        for (const auto& [k, eps] : curve.samples)
            sampled = std::min(sampled, eps / std::abs(k));
        table.add_row({name, conv, fmt_num(k_fermi),
                       fmt_num(girardeau::landau_velocity(curve)), fmt_num(sampled),
                       fmt_num(curve.slope_at_zero)});
    };
    if (requested == "both" || requested == "m-half")
        add_curve("type1", girardeau::type1_curve(k_fermi,
                  girardeau::DispersionConvention::m_half, samples, k_max), "m-half");
    if (requested == "both" || requested == "paper")
        add_curve("type1", girardeau::type1_curve(k_fermi,
                  girardeau::DispersionConvention::paper, samples, k_max), "paper");
    add_curve("free-particle", girardeau::free_particle_curve(samples, k_max), "-");

    const std::string path = join_path(out_dir, "landau.csv");
    table.write(path);
    manifest.outputs.push_back(path);
}

void run_sound(const ValidatedConfig& vc, RunManifest& manifest,
               const std::string& out_dir) {
    const Config& c = vc.config;
    const double rho = c.get_double("rho");

    CsvTable table;
    table.header = {"N", "L", "c_s_dispersion", "c_s_thermo", "pressure",
                    "stiffness", "stiffness_free_boson"};
    for (double nd : c.get_list("N-list")) {
        const int n = static_cast<int>(std::llround(nd));
        lattice::SystemGeometry g{n / rho, n};
        const auto report = girardeau::sound_speed_and_compressibility(g);
        table.add_row({std::to_string(n), fmt_num(g.box_length),
                       fmt_num(report.c_s_dispersion), fmt_num(report.c_s_thermo),
                       fmt_num(report.pressure), fmt_num(report.stiffness),
                       fmt_num(report.stiffness_free_boson)});
    }
    const std::string path = join_path(out_dir, "sound.csv");
    table.write(path);
    manifest.outputs.push_back(path);
    manifest.notes.emplace_back("exponent_convention",
                                "c_s_thermo uses [(-L/(m rho)) dP/dL]^{+1/2}; "
                                "the -1/2 variant is dimensionally inconsistent");
}

void run_extrapolate(const ValidatedConfig& vc, RunManifest& manifest,
                     const std::string& out_dir) {
    const Config& c = vc.config;
    std::ifstream in(c.get("input"));
    if (!in) throw ConfigError("cannot read input file '" + c.get("input") + "'");

    std::vector<std::pair<double, double>> points;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw ConfigError("input rows must be 'L,value'");
        if (first) {
            first = false;
            try {
                std::stod(a);
            } catch (...) {
                continue;   // header row
            }
        }
        try {
            points.emplace_back(std::stod(a), std::stod(b));
        } catch (...) {
            throw ConfigError("malformed numeric row: '" + line + "'");
        }
    }
    const auto fit = girardeau::extrapolate(points);

    nlohmann::json j;
    j["points"] = points.size();
    j["limit"] = fit.limit;
    j["rate"] = fit.rate;
    j["max_residual"] = fit.max_residual;
    const std::string path = join_path(out_dir, "extrapolate_report.json");
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
    manifest.outputs.push_back(path);
}

// ---- kms --------------------------------------------------------------------

nlohmann::json kms_theorem1(double beta, const std::vector<double>& v_list) {
    const auto h = kms::theorem1_hamiltonian();
    const auto p = kms::theorem1_momentum();
    nlohmann::json rows = nlohmann::json::array();
    for (double v : v_list)
        rows.push_back({{"v", v}, {"witness", kms::ness_witness(h, p, v, beta)}});
    return {{"beta", beta},
            {"H", "diag(0,1,1,2)"},
            {"P", "diag(0,1,-1,0)"},
            {"witness_sweep", rows}};
}

nlohmann::json kms_bloch(const std::vector<double>& betas, int sites, double flux) {
    nlohmann::json rows = nlohmann::json::array();
    for (double beta : betas) {
        const auto tr = kms::bloch_current(kms::ring_hamiltonian(sites, 0.0),
                                           kms::ring_bond_current(sites, 0.0), beta);
        const auto broken = kms::bloch_current(kms::ring_hamiltonian(sites, flux),
                                               kms::ring_bond_current(sites, flux), beta);
        rows.push_back({{"beta", beta},
                        {"current_time_reversal", tr.value},
                        {"time_reversal_ok", tr.time_reversal_ok},
                        {"current_flux_broken", broken.value},
                        {"flux_time_reversal_ok", broken.time_reversal_ok},
                        {"flux_message", broken.message}});
    }
    return {{"sites", sites}, {"flux", flux}, {"currents", rows}};
}

nlohmann::json kms_gibbs_demo(int systems, unsigned seed, double beta) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> dim_dist(2, 8);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_hermitian = [&](int dim) {
        kms::Matrix m(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int s = 0; s < dim; ++s)
                m(r, s) = std::complex<double>(gauss(rng), gauss(rng));
        return kms::Matrix((m + m.adjoint()) / 2.0);
    };

    double worst = 0.0;
    const auto grid = kms::default_time_grid();
    for (int i = 0; i < systems; ++i) {
        const int dim = dim_dist(rng);
        const kms::Matrix h = random_hermitian(dim);
        const kms::Matrix a = random_hermitian(dim);
        const kms::Matrix b = random_hermitian(dim);
        const auto state = kms::gibbs(h, beta);
        worst = std::max(worst,
                         kms::kms_residual(state, h, a, b, grid).sup_residual);
    }
    return {{"systems", systems},
            {"beta", beta},
            {"max_gibbs_kms_residual", worst}};
}

void run_kms(const ValidatedConfig& vc, RunManifest& manifest,
             const std::string& out_dir) {
    const Config& c = vc.config;
    const std::string demo = c.get("demo");
    nlohmann::json report;
    if (demo == "all" || demo == "theorem1")
        report["theorem1"] = kms_theorem1(c.get_double("beta"), c.get_list("v-list"));
    if (demo == "all" || demo == "bloch")
        report["bloch"] = kms_bloch(c.get_list("beta-list"), c.get_int("sites"),
                                    c.get_double("flux"));
    if (demo == "all" || demo == "gibbs")
        report["gibbs"] = kms_gibbs_demo(c.get_int("systems"),
                                         static_cast<unsigned>(c.get_int("seed")),
                                         c.get_double("beta"));

    const std::string path = join_path(out_dir, "kms_report.json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << report.dump(2) << "\n";
    manifest.outputs.push_back(path);
}

// ---- meissner ----------------------------------------------------------------

void run_meissner(const ValidatedConfig& vc, RunManifest& manifest,
                  const std::string& out_dir, int& exit_code) {
    const Config& c = vc.config;
    const auto units = c.get("units") == "si" ? meissner::PhysicalUnits::si_pairs()
                                              : meissner::PhysicalUnits::dimensionless();
    meissner::CylinderGeometry geom;
    geom.R = c.get_double("R");
    geom.R_max = geom.R * c.get_int("R-ratio");
    geom.intervals_to_R = static_cast<std::size_t>(c.get_int("nodes"));
    geom.height = c.get_double("height");
    const double b_ext = c.get_double("B-ext");
    const double fit_min = c.get_double("fit-min");
    const double fit_max = c.get_double("fit-max");

    nlohmann::json report;
    report["units"] = c.get("units");
    report["eigen_bc"] = "regular at 0, Dirichlet at R_max (regularization choice)";

    meissner::FieldProfile profile;
    std::vector<double> density;
    std::vector<double> phi;
    if (c.has("frozen-n0")) {
        // Frozen uniform density: the London limit with its closed form.
        const double n0 = c.get_double("frozen-n0");
        density.assign(geom.node_count(), 0.0);
        for (std::size_t i = 0; i <= geom.node_of_R(); ++i) density[i] = n0;
        profile = meissner::maxwell_update(density, b_ext, geom, units);
        phi.assign(geom.node_count(), 0.0);

        const double lam = meissner::london_depth(n0, units);
        double max_rel = 0.0;
        const double denom = std::cyl_bessel_i(0.0, geom.R / lam);
        for (std::size_t i = 0; i <= geom.node_of_R(); ++i) {
            const double exact =
                b_ext * std::cyl_bessel_i(0.0, geom.radius_at(i) / lam) / denom;
            max_rel = std::max(max_rel, std::abs(profile.b_z[i] - exact) / exact);
        }
        const auto fit = meissner::penetration_depth(profile, geom, fit_min, fit_max);
        report["london"] = {{"n0", n0},
                            {"lambda_L", lam},
                            {"max_rel_error_vs_closed_form", max_rel},
                            {"fitted_lambda", fit.lambda},
                            {"fit_r_squared", fit.r_squared},
                            {"fit_points", fit.points_used}};
    } else {
        meissner::ScfConfig scf;
        scf.n_particles = c.get_double("n-particles");
        scf.tol = c.get_double("tol");
        scf.mix = c.get_double("mix");
        scf.max_iter = c.get_int("max-iter");
        scf.k_sector_diagnostic = c.get_bool("k-diagnostic");
        auto [state, field] = meissner::scf_solve(b_ext, geom, units, scf);
        profile = field;
        density = state.density;
        phi = state.phi0;

        report["scf"] = {{"iterations", state.iterations},
                         {"residual", state.residual},
                         {"converged", state.converged},
                         {"E0", state.e0},
                         {"residual_history", state.residual_history}};
        if (state.e0_k1)
            report["scf"]["E0_k1"] = *state.e0_k1;
        try {
            const auto fit = meissner::penetration_depth(profile, geom, fit_min, fit_max);
            report["penetration"] = {{"lambda", fit.lambda},
                                     {"r_squared", fit.r_squared},
                                     {"points", fit.points_used},
                                     {"decay_found", fit.decay_found}};
        } catch (const std::invalid_argument& e) {
            report["penetration"] = {{"error", e.what()}};
        }
        if (!state.converged) exit_code = kExitNonConvergence;
    }

    CsvTable table;
    table.header = {"rho", "a", "B_z", "n", "phi0"};
    for (std::size_t i = 0; i < geom.node_count(); ++i)
        table.add_row({fmt_num(geom.radius_at(i)), fmt_num(profile.a[i]),
                       fmt_num(profile.b_z[i]),
                       fmt_num(i < density.size() ? density[i] : 0.0),
                       fmt_num(i < phi.size() ? phi[i] : 0.0)});
    const std::string csv_path = join_path(out_dir, "meissner_profile.csv");
    table.write(csv_path);
    manifest.outputs.push_back(csv_path);

    const std::string json_path = join_path(out_dir, "meissner_report.json");
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + json_path);
    out << report.dump(2) << "\n";
    manifest.outputs.push_back(json_path);
}

} // namespace

std::string resolve_out_dir(const Config& config) {
    if (config.has("out") && !config.get("out").empty()) return config.get("out");
    if (const char* env = std::getenv("SFLAB_OUTDIR"); env && *env) return env;
    return ".";
}

int run_subcommand(const std::string& subcommand, const Config& raw,
                   std::ostream& diag) {
    const auto start = std::chrono::steady_clock::now();
    try {
        ValidatedConfig vc = validate_config(raw, subcommand);
        for (const std::string& w : vc.warnings) diag << "warning: " << w << "\n";
        const std::string out_dir = resolve_out_dir(vc.config);

        RunManifest manifest;
        manifest.subcommand = subcommand;
        manifest.config = vc.config;
        manifest.warnings = vc.warnings;
        int exit_code = kExitOk;

        if (subcommand == "spectrum") run_spectrum(vc, manifest, out_dir);
        else if (subcommand == "umklapp") run_umklapp(vc, manifest, out_dir);
        else if (subcommand == "ness") run_ness(vc, manifest, out_dir);
        else if (subcommand == "metastability") run_metastability(vc, manifest, out_dir);
        else if (subcommand == "landau") run_landau(vc, manifest, out_dir);
        else if (subcommand == "sound") run_sound(vc, manifest, out_dir);
        else if (subcommand == "kms") run_kms(vc, manifest, out_dir);
        else if (subcommand == "meissner") run_meissner(vc, manifest, out_dir, exit_code);
        else if (subcommand == "extrapolate") run_extrapolate(vc, manifest, out_dir);
        else throw ConfigError("unknown subcommand '" + subcommand + "'");

        manifest.wall_time_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                      start).count();
        const std::string manifest_path =
            join_path(out_dir, subcommand + "_manifest.json");
        manifest.write(manifest_path);
        for (const std::string& path : manifest.outputs)
            diag << "wrote " << path << "\n";
        diag << "wrote " << manifest_path << "\n";
        return exit_code;
    } catch (const ConfigError& e) {
        diag << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const BudgetError& e) {
        diag << "budget error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const ConvergenceError& e) {
        diag << "convergence error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const std::invalid_argument& e) {
        diag << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int replay_manifest(const std::string& manifest_path,
                    const std::string& out_override, std::ostream& diag) {
    std::ifstream in(manifest_path);
    if (!in) {
        diag << "config error: cannot read manifest '" << manifest_path << "'\n";
        return kExitConfig;
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        diag << "config error: malformed manifest: " << e.what() << "\n";
        return kExitConfig;
    }
    if (!j.contains("subcommand") || !j.contains("config")) {
        diag << "config error: manifest lacks subcommand/config\n";
        return kExitConfig;
    }
    Config raw;
    for (const auto& [key, value] : j["config"].items())
        raw.values[key] = value.get<std::string>();
    if (!out_override.empty()) raw.values["out"] = out_override;
    return run_subcommand(j["subcommand"].get<std::string>(), raw, diag);
}

} // namespace sflab::cli
