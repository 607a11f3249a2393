// model.hpp — mode networks of damped/amplified bosons and their dynamical matrices.
//
// A system of n modes with quadratic couplings evolves under the linear
// Heisenberg-Langevin equations  d⟨â⟩/dt = −iM⟨â⟩ + L̂  for the interleaved
// operator vector â = [a₁, a₁†, a₂, a₂†, …].  This module builds M for the
// supported topologies, applies named rate constraints, and injects
// perturbations for degeneracy probing.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eigenpoint {

using Complex = std::complex<double>;
using Matrix  = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

// ---------------------------------- couplings --------------------------------

// Linear (epsilon) and nonlinear (kappa) coupling strengths between two modes.
struct CouplingParams {
    double epsilon{1.0};
    double kappa{0.0};

    CouplingParams() = default;
    CouplingParams(double eps, double kap) : epsilon(eps), kappa(kap) {
        if (eps < 0.0 || kap < 0.0)
            throw std::invalid_argument("CouplingParams: coupling strengths must be nonnegative");
    }

    // sqrt(epsilon² − kappa²); switches to the imaginary branch when kappa > epsilon
    Complex zeta() const {
        return std::sqrt(Complex(epsilon * epsilon - kappa * kappa, 0.0));
    }

    // 2×2 coupling block [[ε, κ], [−κ, −ε]] acting on an (a, a†) pair
    Eigen::Matrix2cd xi() const {
        Eigen::Matrix2cd b;
        b << epsilon, kappa, -kappa, -epsilon;
        return b;
    }
};

// ---------------------------------- topology ---------------------------------

enum class Topology { Circular4, Tetrahedral4, Chain, UniConcat };

// How a one-way inter-subsystem edge enters the dynamical matrix.
//   Xi           — insert the 2×2 block ξ below the diagonal (matrix-level coupling)
//   Hamiltonian1 — edge generated by H = ε a_i a_j† + κ a_i a_j
//   Hamiltonian2 — edge generated by H = ε a_i a_j† + κ a_i† a_j†
enum class CouplingKind { Xi, Hamiltonian1, Hamiltonian2 };

// One-way concatenation of two chain subsystems. Edges run from a mode of the
// left chain to a mode of the right chain (1-based within each part).
struct ConcatSpec {
    int left{1};
    int right{1};
    std::vector<std::pair<int, int>> edges;  // empty → default {(left, 1)}
    CouplingKind kind{CouplingKind::Xi};
};

// Declarative description of a bosonic configuration.
struct SystemSpec {
    Topology topology{Topology::Chain};
    int n{1};                                // mode count
    CouplingParams coupling{};
    std::vector<double> gamma;               // one rate per mode; >0 damps, <0 amplifies
    std::optional<std::string> constraint;   // named rate constraint, applied on request
    std::optional<ConcatSpec> concat;        // required iff topology == UniConcat
};

// Throws std::invalid_argument when the spec is malformed (rate-list length
// mismatch, missing/inconsistent concat block, edge referencing a nonexistent
// mode, n out of range for the fixed-size topologies).
void validate_spec(const SystemSpec& spec);

// ------------------------------ dynamical matrix -----------------------------

// Generator of the Heisenberg-Langevin equations. `reduced == false`: the full
// 2n×2n matrix in the interleaved (a₁, a₁†, …) basis; `reduced == true`: the
// n×n matrix obtained by treating every coupling block as the scalar ξ-branch
// value (valid because all blocks share one ξ).
struct DynamicalMatrix {
    Matrix m;
    int modes{0};
    bool reduced{false};
    // block coordinates (row mode, col mode) of every ξ insertion; empty for
    // Hamiltonian-generated couplings where no shared 2×2 block exists
    std::vector<std::pair<int, int>> coupling_blocks;

    int dim() const { return static_cast<int>(m.rows()); }
};

// Assembles the full 2n×2n dynamical matrix. Diagonal blocks are −i·γ_j/2·I₂;
// coupling blocks are ξ for the bidirectional topologies, and for UniConcat the
// inter-subsystem insertions sit strictly below the diagonal (Xi kind) or are
// read off the Heisenberg equations of the one-way Hamiltonians.
DynamicalMatrix build_system(const SystemSpec& spec);

// n×n companion of build_system with the coupling block replaced by the scalar
// `xi`. Only defined for Xi-kind couplings.
DynamicalMatrix build_reduced(const SystemSpec& spec, Complex xi);

// ------------------------------ rate constraints -----------------------------

// Named constraints from the registry. Each overwrites the dependent rates of
// a spec (free rates preserved) and is idempotent.
//
//   "equal-13-24" : γ₃ ← γ₁, γ₄ ← γ₂          (Circular4, UniConcat 2+2)
//   "equal-12-34" : γ₂ ← γ₁, γ₄ ← γ₃          (Tetrahedral4)
//   "equal-rates" : γ₁ ← γ₂                   (two-mode systems)
//   "damp-amp"    : γ₂ ← −γ₁                  (two-mode systems)
//   "head-mean"   : γ₁ ← (γ₂+γ₃)/2            (UniConcat 1+2)
//   "mid-mean"    : γ₂ ← (γ₁+γ₃)/2            (Chain 3)
//   "sum-match"   : γ₄ ← (γ₃+γ₅)/2 and γ₁+γ₂ rescaled to γ₃+γ₅,
//                   preserving γ₁−γ₂          (UniConcat 2+3)
//   "diff-match"  : γ₁−γ₂ rescaled so that (γ₁−γ₂)/4 = (γ₃−γ₅)/(4√2),
//                   preserving γ₁+γ₂          (UniConcat 2+3)
//   "ends-equal"  : γ₄ ← γ₁, γ₆ ← γ₃, γ₂ ← γ₅ ← (γ₁+γ₃)/2   (UniConcat 3+3)
SystemSpec apply_constraint(const SystemSpec& spec, const std::string& name);

// Registry names applicable to the given spec's shape.
std::vector<std::string> applicable_constraints(const SystemSpec& spec);

// True when the spec's rates already satisfy the named constraint (relative
// tolerance on the overwritten entries).
bool constraint_satisfied(const SystemSpec& spec, const std::string& name, double tol = 1e-12);

// ------------------------------- perturbations -------------------------------

// Selects where an additive probe δ enters a dynamical matrix.
//   Entry         — raw matrix entry (i, j) += δ
//   CouplingEntry — entry (i, j) of every shared ξ block += δ
//   RateEntry     — entry (i, j) of mode `mode`'s rate block += δ, i.e. the
//                   matrix entry picks up −iδ
struct PerturbSite {
    enum class Kind { Entry, CouplingEntry, RateEntry };
    Kind kind{Kind::Entry};
    int i{0};
    int j{0};
    int mode{0};

    static PerturbSite entry(int i, int j) { return {Kind::Entry, i, j, 0}; }
    static PerturbSite coupling_entry(int i, int j) { return {Kind::CouplingEntry, i, j, 0}; }
    static PerturbSite rate_entry(int mode, int i, int j) { return {Kind::RateEntry, i, j, mode}; }
};

// Returns M plus the additive perturbation at the selected site; M unmodified.
DynamicalMatrix perturb(const DynamicalMatrix& M, const PerturbSite& site, double delta);

}  // namespace eigenpoint
