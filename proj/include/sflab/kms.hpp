#pragma once

// Finite-dimensional analogue of the KMS/NESS mechanism and of Bloch's
// theorem: Gibbs states, the KMS boundary identity F(t+i*beta) = G(t)
// evaluated by exact spectral calculus, the boosted-dynamics witness, and
// current expectations under time reversal.

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sflab::kms {

using Matrix = Eigen::MatrixXcd;

/// Hermitian pair (H, P) with [H, P] = 0 plus named observables.
struct FiniteQuantumSystem {
    Matrix H;
    Matrix P;
    std::map<std::string, Matrix> observables;

    Eigen::Index dim() const { return H.rows(); }
    /// Hermiticity to 1e-12 and commutator norm below 1e-10 (relative).
    void validate() const;
};

struct GibbsState {
    double beta = 0.0;
    Matrix rho;
};

/// rho = exp(-beta*H)/Tr exp(-beta*H), spectrally, with the spectrum shifted
/// by its minimum so the exponentials never overflow.
GibbsState gibbs(const Matrix& H, double beta);

struct KmsResidualReport {
    double sup_residual = 0.0;
    std::vector<double> grid;
    std::pair<std::string, std::string> pair_names;
};

/// sup over the t-grid of |F(t + i*beta) - Tr(rho alpha_t(B) A)| where
/// F(z) = Tr(rho A e^{izH_dyn} B e^{-izH_dyn}); the continuation is done by
/// spectral calculus, no numerical contour integration. Zero (to tolerance)
/// iff the tested dynamics is KMS for the state on this pair.
KmsResidualReport kms_residual(const GibbsState& state, const Matrix& H_dyn,
                               const Matrix& A, const Matrix& B,
                               const std::vector<double>& t_grid,
                               const std::string& name_a = "A",
                               const std::string& name_b = "B");

/// Default time grid used by the witness.
std::vector<double> default_time_grid();

/// Max KMS residual of Gibbs(H, beta) under the boosted dynamics H + v*P
/// over the spanning set of matrix-unit pairs (E_ab, E_ba). Returns 0 (to
/// 1e-10) iff v*P acts as zero on the Gibbs support.
double ness_witness(const Matrix& H, const Matrix& P, double v, double beta);

struct BlochResult {
    double value = 0.0;            // Tr(rho_beta j), real part
    bool time_reversal_ok = false; // H real symmetric in this basis
    bool current_odd_ok = false;   // j Hermitian with conj(j) = -j
    std::string message;
};

/// Current expectation in the Gibbs state. When H is invariant under complex
/// conjugation and j is odd under it, |value| <= 1e-12 is the contract;
/// violated preconditions are reported, never silently ignored.
BlochResult bloch_current(const Matrix& H, const Matrix& j, double beta);

/// |d/dt Tr(rho_beta alpha_{t,v}(A))| estimated by central differences; zero
/// for [H, P] = 0 (the stationary half of a NESS).
double stationarity_defect(const Matrix& H, const Matrix& P, double v,
                           double beta, const Matrix& A, double t, double dt);

// --- demo systems -----------------------------------------------------------

/// The documented 4x4 boosted family: H = diag(0,1,1,2), P = diag(0,1,-1,0).
Matrix theorem1_hamiltonian();
Matrix theorem1_momentum();

/// Tight-binding ring with hopping phase `flux` per bond (flux = 0: real H).
Matrix ring_hamiltonian(int sites, double flux);

/// Bond current i*(t E_{01} - t* E_{10}) with t = e^{i*flux}.
Matrix ring_bond_current(int sites, double flux);

} // namespace sflab::kms
