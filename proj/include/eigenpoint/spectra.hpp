// spectra.hpp — closed-form eigensystems of the cataloged configurations.
//
// Every coupling block of a supported system is the same 2×2 matrix ξ, so the
// full 2n×2n dynamical matrix splits into two n×n branches, one per eigenvalue
// of ξ. The catalog below stores the reduced eigenpairs of each branch in
// closed form; lift_full_spectrum composes them with the ξ eigenvectors back
// into the full 2n-dimensional eigensystem.

#pragma once

#include "eigenpoint/model.hpp"

#include <array>

namespace eigenpoint {

// Requested closed form is not in the catalog; fall back to the numeric path.
struct NoClosedForm : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------- ξ eigensystem -------------------------------

struct XiEigensystem {
    std::array<Complex, 2> values;                // ∓ζ
    std::array<Eigen::Vector2cd, 2> vectors;      // unnormalized
};

// Eigenpairs of the coupling block ξ. The generic eigenvectors are
// [−(ε∓ζ)/κ, 1]; at κ = 0 the analytic limits [0,1] (for −ε) and [1,0]
// (for +ε) are returned, and at ζ = 0 the two pairs coalesce.
XiEigensystem xi_eigensystem(const CouplingParams& c);

// ----------------------------- rate conventions ------------------------------

// Per-topology rate aggregates. gamma_plus/minus are the quarter sum/difference
// of the two rates the topology pairs up; gamma_minus_bar is the second
// difference used by the 2+3 concatenation. beta_coeff is the integer m in
// β² = m·ξ² − γ₋² (0 when the family has no β branch).
struct RateAggregates {
    double gamma_plus{0.0};
    double gamma_minus{0.0};
    double gamma_minus_bar{0.0};
    int beta_coeff{0};
};

RateAggregates rate_aggregates(const SystemSpec& spec);

// --------------------------- reduced block spectra ----------------------------

struct BlockEigenSystem {
    XiEigensystem xi;
    std::array<std::vector<Complex>, 2> values;   // reduced eigenvalues per ξ branch
    std::array<std::vector<CVector>, 2> vectors;  // unnormalized; empty when not cataloged
    Complex beta{0.0, 0.0};                       // principal-branch sqrt of β²
    Complex beta_bar{0.0, 0.0};                   // 2+3 family only
};

// Closed-form reduced eigensystem of a cataloged configuration. Requires the
// topology's rate constraint to hold (apply_constraint first) and Xi-kind
// couplings for concatenations. Throws NoClosedForm otherwise.
BlockEigenSystem analytic_eigensystem(const SystemSpec& spec);

struct FullSpectrum {
    std::vector<Complex> values;     // size 2n, branches interleaved
    std::vector<CVector> vectors;    // size 2n or empty
};

// Lifts reduced eigenpairs to the full 2n×2n system: Λ alternates between the
// two ξ branches, and each full eigenvector is the Kronecker composition of a
// reduced eigenvector with the branch's ξ eigenvector.
FullSpectrum lift_full_spectrum(const BlockEigenSystem& block);

// ------------------------------ locus residuals ------------------------------

// Signed distance functions that vanish exactly where a configuration family
// reaches its eigenvalue-coalescence locus:
//   "ring4"      : κ²/ε² + γ₋²/(4ε²) − 1    (four-mode ring and tetrahedron)
//   "chain2"     : κ²/ε² + γ₋²/ε² − 1       (two-mode chain and its concatenations)
//   "chain3"     : κ²/ε² + γ₋²/(2ε²) − 1    (three-mode chain, 3+3 concatenation)
//   "chain3-bar" : κ²/ε² + γ̄₋²/(2ε²) − 1    (2+3 concatenation, right part)
//   "diff-match" : γ₋ − γ̄₋/√2               (2+3 concatenation, joint condition)
struct LocusResidual {
    std::string name;
    double value{0.0};
};

LocusResidual locus_residual(const SystemSpec& spec, const std::string& name);

// Residual evaluated directly at grid coordinates u = κ/ε, v = γ₋/ε
// (v plays the role of γ̄₋/ε for "chain3-bar").
double locus_residual_normalized(const std::string& name, double u, double v);

}  // namespace eigenpoint
