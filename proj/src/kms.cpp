#include "sflab/kms.hpp"

#include <cmath>
#include <stdexcept>

namespace sflab::kms {

namespace {

using Complex = std::complex<double>;

double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double scale_of(const Matrix& m) {
    const double s = m.cwiseAbs().maxCoeff();
    return s > 0.0 ? s : 1.0;
}

void require_hermitian(const Matrix& m, const char* what) {
    if (m.rows() != m.cols())
        throw std::invalid_argument(std::string(what) + " must be square");
    if (hermiticity_defect(m) > 1e-12 * scale_of(m))
        throw std::invalid_argument(std::string(what) + " is not Hermitian");
}

struct Spectral {
    Eigen::VectorXd values;
    Matrix vectors;
};

Spectral diagonalize(const Matrix& H) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(H);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("Hermitian eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

} // namespace

void FiniteQuantumSystem::validate() const {
    require_hermitian(H, "H");
    require_hermitian(P, "P");
    if (P.rows() != H.rows())
        throw std::invalid_argument("H and P dimensions differ");
    const double comm = (H * P - P * H).cwiseAbs().maxCoeff();
    if (comm > 1e-10 * scale_of(H) * scale_of(P))
        throw std::invalid_argument("[H, P] != 0 beyond tolerance");
}

GibbsState gibbs(const Matrix& H, double beta) {
    require_hermitian(H, "H");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");

    const Spectral es = diagonalize(H);
    const double e_min = es.values.minCoeff();
    Eigen::VectorXd weights = (-beta * (es.values.array() - e_min)).exp();
    const double z = weights.sum();
    Matrix rho = es.vectors * (weights / z).asDiagonal() * es.vectors.adjoint();
    return {beta, std::move(rho)};
}

KmsResidualReport kms_residual(const GibbsState& state, const Matrix& H_dyn,
                               const Matrix& A, const Matrix& B,
                               const std::vector<double>& t_grid,
                               const std::string& name_a,
                               const std::string& name_b) {
    require_hermitian(H_dyn, "H_dyn");
    if (t_grid.empty())
        throw std::invalid_argument("kms_residual: empty time grid");

    const Spectral es = diagonalize(H_dyn);
    // Work in the H_dyn eigenbasis; the evolved B at complex time z has
    // entries B_rs * exp(i z (d_r - d_s)), which is exact.
    const Matrix rho_t = es.vectors.adjoint() * state.rho * es.vectors;
    const Matrix a_t = es.vectors.adjoint() * A * es.vectors;
    const Matrix b_t = es.vectors.adjoint() * B * es.vectors;
    const Eigen::Index n = H_dyn.rows();

    auto evolved_b = [&](Complex z) {
        Matrix out(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index s = 0; s < n; ++s)
                out(r, s) = b_t(r, s) *
                            std::exp(Complex(0.0, 1.0) * z * (es.values(r) - es.values(s)));
        return out;
    };

    KmsResidualReport report;
    report.grid = t_grid;
    report.pair_names = {name_a, name_b};
    for (double t : t_grid) {
        const Complex f_shifted =
            (rho_t * a_t * evolved_b(Complex(t, state.beta))).trace();
        const Complex g = (rho_t * evolved_b(Complex(t, 0.0)) * a_t).trace();
        report.sup_residual = std::max(report.sup_residual, std::abs(f_shifted - g));
    }
    return report;
}

std::vector<double> default_time_grid() { return {-1.0, -0.3, 0.0, 0.3, 1.0}; }

double ness_witness(const Matrix& H, const Matrix& P, double v, double beta) {
    FiniteQuantumSystem sys{H, P, {}};
    sys.validate();

    const GibbsState state = gibbs(H, beta);
    const Matrix h_dyn = H + v * P;
    const Eigen::Index n = H.rows();
    const std::vector<double> grid = default_time_grid();

    double witness = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            Matrix unit_ab = Matrix::Zero(n, n);
            unit_ab(a, b) = 1.0;
            Matrix unit_ba = Matrix::Zero(n, n);
            unit_ba(b, a) = 1.0;
            const KmsResidualReport r =
                kms_residual(state, h_dyn, unit_ab, unit_ba, grid);
            witness = std::max(witness, r.sup_residual);
        }
    }
    return witness;
}

BlochResult bloch_current(const Matrix& H, const Matrix& j, double beta) {
    require_hermitian(H, "H");
    require_hermitian(j, "j");
    if (j.rows() != H.rows())
        throw std::invalid_argument("H and j dimensions differ");

    BlochResult result;
    const double im_h = H.imag().cwiseAbs().maxCoeff();
    result.time_reversal_ok = im_h <= 1e-12 * scale_of(H);
    const double odd_defect = (j + j.conjugate()).cwiseAbs().maxCoeff();
    result.current_odd_ok = odd_defect <= 1e-12 * scale_of(j);
    if (!result.time_reversal_ok)
        result.message = "H is not real in the conjugation basis (time reversal broken)";
    else if (!result.current_odd_ok)
        result.message = "j is not odd under complex conjugation";

    const GibbsState state = gibbs(H, beta);
    const Complex value = (state.rho * j).trace();
    result.value = value.real();
    return result;
}

double stationarity_defect(const Matrix& H, const Matrix& P, double v,
                           double beta, const Matrix& A, double t, double dt) {
    const GibbsState state = gibbs(H, beta);
    const Spectral es = diagonalize(H + v * P);
    const Matrix rho_t = es.vectors.adjoint() * state.rho * es.vectors;
    const Matrix a_t = es.vectors.adjoint() * A * es.vectors;
    const Eigen::Index n = H.rows();

    auto expectation = [&](double time) {
        Matrix evolved(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index s = 0; s < n; ++s)
                evolved(r, s) = a_t(r, s) *
                                std::exp(Complex(0.0, time * (es.values(r) - es.values(s))));
        return (rho_t * evolved).trace();
    };

    return std::abs(expectation(t + dt) - expectation(t - dt)) / (2.0 * dt);
}

Matrix theorem1_hamiltonian() {
    Matrix h = Matrix::Zero(4, 4);
    h.diagonal() << 0.0, 1.0, 1.0, 2.0;
    return h;
}

Matrix theorem1_momentum() {
    Matrix p = Matrix::Zero(4, 4);
    p.diagonal() << 0.0, 1.0, -1.0, 0.0;
    return p;
}

Matrix ring_hamiltonian(int sites, double flux) {
    if (sites < 3) throw std::invalid_argument("ring needs at least 3 sites");
    Matrix h = Matrix::Zero(sites, sites);
    const Complex hop = std::exp(Complex(0.0, flux));
    for (int i = 0; i < sites; ++i) {
        const int next = (i + 1) % sites;
        h(i, next) += hop;
        h(next, i) += std::conj(hop);
    }
    return h;
}

Matrix ring_bond_current(int sites, double flux) {
    if (sites < 3) throw std::invalid_argument("ring needs at least 3 sites");
    Matrix j = Matrix::Zero(sites, sites);
    const Complex hop = std::exp(Complex(0.0, flux));
    j(0, 1) = Complex(0.0, 1.0) * hop;
    j(1, 0) = std::conj(j(0, 1));
    return j;
}

} // namespace sflab::kms
