// singularity.hpp — numerical identification of exceptional, diabolical, and
// hybrid points of a dynamical matrix.
//
// Two independent probes are provided: the Jordan structure recovered from the
// rank staircase of (M − λI)^k, and eigenvalue-splitting scans under a small
// additive perturbation. The exceptional degeneracy (ED) of an eigenvalue
// cluster is its largest Jordan block; the diabolical degeneracy (DD) is the
// number of blocks of that size.

#pragma once

#include "eigenpoint/model.hpp"

namespace eigenpoint {

// Rank decisions or eigenvalue tracking too ambiguous at the current
// tolerances; adjust cluster_tol / rank_tol and retry.
struct Indeterminate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double cluster_tol{-1.0};  // < 0 → 1e-7 · ‖M‖₂
    double rank_tol{1e-9};     // relative singular-value threshold
};

double default_cluster_tol(const Matrix& m);

// ----------------------------- eigenvalue clusters ---------------------------

struct EigenCluster {
    Complex mean;
    std::vector<int> members;          // indices into the solver's eigenvalue list
    std::vector<Complex> values;
    Matrix subspace;                   // orthonormal basis of the invariant subspace
};

// Eigenvalues grouped by single-linkage clustering at pairwise distance
// ≤ cluster_tol; deterministic cluster order.
std::vector<EigenCluster> numeric_eigensystem(const Matrix& m, double cluster_tol);

// ------------------------------ Jordan structure ------------------------------

struct JordanCluster {
    Complex eigenvalue;
    int multiplicity{0};
    std::vector<int> block_sizes;      // descending; sum == multiplicity
};

struct JordanReport {
    std::vector<JordanCluster> clusters;
    double similarity_condition{0.0};  // cond₂ of the similarity transform; inf if none found
    int dim{0};
    double cluster_tol_used{0.0};      // final rung of the escalation ladder

    int max_block() const;
};

// Block sizes per cluster from the rank staircase of (M − λI)^k: the number of
// blocks of size ≥ k equals rank((M−λI)^{k−1}) − rank((M−λI)^k). Ranks are
// decided by singular values against rank_tol · ‖M−λI‖₂^k; a decision with a
// singular-value gap below 10× throws Indeterminate.
//
// Computed eigenvalues of a size-p Jordan block scatter like ε^(1/p), so the
// clustering tolerance is escalated (starting from cluster_tol, capped at
// 2e-2·‖M‖) until every cluster's staircase closes at its multiplicity; a
// fragmented or overmerged cluster cannot. Throws Indeterminate when no
// tolerance on the ladder yields a consistent structure.
JordanReport jordan_structure(const Matrix& m, double rank_tol = 1e-9,
                              double cluster_tol = -1.0);

// ----------------------------- perturbation scans -----------------------------

struct DeltaGrid {
    double min{1e-10};
    double max{1e-4};
    int steps{25};

    std::vector<double> values() const;  // geometric grid
};

struct ScanResult {
    std::vector<double> deltas;
    std::vector<double> splittings;            // max pairwise gap inside the tracked cluster
    std::vector<double> overlaps;              // eigenvector overlap F inside the cluster
    std::vector<std::vector<Complex>> tracks;  // eigenvalues matched to the unperturbed order
    Complex cluster_mean;
    std::vector<int> cluster_members;
    double slope{0.0};                         // log-log fit of splitting vs delta
    int moving_branches{0};
};

// Perturbs M at `site` over the delta grid, matches eigenvalues to the
// unperturbed spectrum by optimal assignment, and fits the splitting exponent
// of the largest cluster over the inner half of the grid (points below
// 1e-12·‖M‖ are discarded). A grossly non-monotone splitting throws
// Indeterminate.
ScanResult perturbation_scan(const DynamicalMatrix& m, const PerturbSite& site,
                             const DeltaGrid& grid = {}, double cluster_tol = -1.0);

// -------------------------------- classification -----------------------------

enum class PointKind { Regular, QEP, QDP, QHP };

std::string to_string(PointKind k);

struct SingularityReport {
    PointKind kind{PointKind::Regular};
    int ed_order{1};
    int dd_order{1};
    Complex eigenvalue;
    JordanReport jordan;
    double slope{0.0};        // from the default perturbation scan; NaN if the scan failed
    double min_overlap{1.0};  // smallest F seen across the scan grid
};

// Combines the Jordan structure with a corroborating perturbation scan over
// `grid`. ED/DD are read from the dominant cluster (largest block, ties by
// multiplicity); QEP ⇔ ed ≥ 2 ∧ dd = 1, QDP ⇔ ed = 1 ∧ dd ≥ 2, QHP ⇔ both ≥ 2.
SingularityReport classify(const DynamicalMatrix& m, const Tolerances& tols = {},
                           const DeltaGrid& grid = {});

}  // namespace eigenpoint
