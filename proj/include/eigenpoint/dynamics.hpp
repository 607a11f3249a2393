// dynamics.hpp — time evolution of the two-mode one-way-coupled model.
//
// Mode 1 is damped and mode 2 amplified at the common rate 2γ (rates enter the
// dynamical matrix halved), coupled one-way by ξ. The Langevin forces of the
// damped/amplified reservoirs restore the field commutators of a bidirectional
// system exactly; for one-way coupling they cannot, and the residual anomaly
// bounds the model's validity window t ≪ min(1/γ, 1/ε).

#pragma once

#include "eigenpoint/model.hpp"

namespace eigenpoint {

// quadrature refinement stalled before reaching the requested tolerance
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------ time functions -------------------------------

// Scalar functions of γt shared by the closed-form correlators.
struct TimeFunctions {
    double gamma{1.0};

    double mu(double t) const { return std::exp(-gamma * t); }            // μ = e^{−γt}
    double s(double t) const { return std::sinh(2.0 * gamma * t); }       // s = sinh 2γt
    double sigma(double t) const { return std::exp(-2.0 * gamma * t) - 1.0 + 2.0 * gamma * t; }
    double psi(double t) const { return std::exp(-2.0 * gamma * t) - 1.0 - 2.0 * gamma * t; }
    double phi(double t) const { return std::exp(2.0 * gamma * t) - 1.0 - 2.0 * gamma * t; }
    double l1(double t) const { return std::exp(-2.0 * gamma * t) + 1.0; }
    double l2(double t) const { return std::exp(-2.0 * gamma * t) - 1.0; }
};

// ------------------------------ matrix exponential ----------------------------

// Scaling-and-squaring with the fixed order-13 Padé approximant.
Matrix matrix_exp(const Matrix& a);

// Evolution matrix P(t) = exp(−iMt).
Matrix propagator(const Matrix& m, double t);

// Annihilation-sector blocks of P: U_{jk} = P_{2j,2k}, V_{jk} = P_{2j,2k+1}
// (0-based rows/columns of the interleaved basis).
struct UVBlocks {
    Matrix u;
    Matrix v;
};
UVBlocks extract_uv(const Matrix& p);

// ------------------------------- two-mode model -------------------------------

struct UniParams {
    double gamma{1.0};    // half the damping rate of mode 1 (= minus half of mode 2's)
    double epsilon{1.0};
    double kappa{0.0};
};

// The equivalent SystemSpec (UniConcat 1+1, rates {2γ, −2γ}).
SystemSpec uni_spec(const UniParams& p);

// Closed-form U(t), V(t): U = [[μ, 0], [−iε·sinh(γt)/γ, 1/μ]],
// V = [[0, 0], [−iκ·sinh(γt)/γ, 0]].
UVBlocks uni_uv(const UniParams& p, double t);

// -------------------------------- Langevin noise ------------------------------

// Diagonal white-noise strengths ⟨L̂ L̂†ᵀ⟩/δ for a rate list: a damped mode j
// contributes γ_j at the (a_j, a_j†) slot, an amplified one |γ_j| at the
// (a_j†, a_j) slot (vacuum reservoirs, fluctuation–dissipation).
Matrix noise_correlation(const std::vector<double>& gamma);

// Commutator counterpart [L̂, L̂†ᵀ]/δ = diag(γ₁, −γ₁, γ₂, −γ₂, …); identical for
// damping and amplification.
Matrix noise_commutator(const std::vector<double>& gamma);

// Accumulated-force correlation matrix ⟨F̂(t)F̂†ᵀ(t)⟩ of the two-mode model in
// closed form: blocks F₁ = diag(1−μ², 0), F₁₂ = iσ/(2γ)·[[ε, −κ], [0, 0]],
// F₂ = (s−2γt)/(2γ²)·[[ε², −εκ], [−εκ, κ²]] + (1/μ²−1)·diag(0, 1).
Matrix force_correlations(const UniParams& p, double t);

// Same matrix by numerical quadrature of ∫₀ᵗ P(τ) N P†(τ) dτ with the white
// noise reduced to a single time integral. Throws QuadratureError if panel
// doubling stalls above rel_tol.
Matrix force_correlations_quadrature(const UniParams& p, double t, double rel_tol = 1e-10);

// Full commutator matrix ⟨[â_j(t), â_k†(t)]⟩ reconstructed from the propagator
// and the accumulated noise: P J P† + ∫₀ᵗ P N_c P† dτ, J = diag(1, −1, …).
// Works for any dynamical matrix with per-mode rates.
Matrix commutator_matrix(const Matrix& m, const std::vector<double>& gamma, double t,
                         double rel_tol = 1e-10);

// ----------------------------- consistency checks -----------------------------

struct CommutatorCheck {
    Complex comm22;   // ⟨[a₂, a₂†]⟩ = 1 + (ε²−κ²)φ(t)/(2γ²)
    Complex comm12;   // ⟨[a₁, a₂†]⟩ = iεt
    bool valid;       // t ≤ margin · min(1/γ, 1/ε)
};

// Exact anomalous commutators of the one-way model plus the validity flag.
CommutatorCheck commutator_check(const UniParams& p, double t, double margin = 0.01);

struct ReservoirCheck {
    Matrix correlation;            // 4×4 Hermitian force-correlation matrix
    Eigen::VectorXd eigenvalues;   // ascending
    bool physical;                 // min eigenvalue ≥ −1e−12
};

// Correlation matrix the reservoir Langevin forces would need in order to
// restore the commutators at every time, and its eigenvalues. A negative
// eigenvalue means no physical reservoir realizes it.
ReservoirCheck reservoir_consistency(const UniParams& p, double t);

// ------------------------------ Gaussian evolution ----------------------------

struct GaussianSample {
    double t{0.0};
    Complex alpha1, alpha2;   // coherent amplitudes
    double b2{0.0};           // ⟨δa₂†δa₂⟩
    Complex c2, d;            // ⟨(δa₂)²⟩, ⟨δa₁δa₂⟩
    double tau1{0.0}, tau2{0.0};
    double nu_minus{1.0};
    double en{0.0};           // logarithmic negativity from the symplectic spectrum
    double en_short{0.0};     // first-order small-t expansion of E_N
    Complex comm22, comm12;
    bool valid{true};
};

struct GaussianTrajectory {
    UniParams params;
    std::vector<GaussianSample> samples;
};

// Gaussian-state trajectory for initial coherent amplitudes alpha0: second
// moments from the U/V blocks and force correlators, nonclassicality depths
// τ = max{0, |C|−B} per mode, and E_N = max{0, −ln ν₋} from the symplectic
// eigenvalues of the partially transposed covariance matrix.
GaussianTrajectory gaussian_evolution(const UniParams& p, const std::array<Complex, 2>& alpha0,
                                      const std::vector<double>& times, double margin = 0.01);

}  // namespace eigenpoint
