// moments.hpp — degeneracy structure of k-th-order field-operator moments.
//
// Once the first-order spectrum is partitioned into clusters (Λ_j, n_j) — one
// cluster per Jordan block, n_j coalescing eigenvectors each — the moment
// dynamics at order k decomposes into classes indexed by compositions
// k = Σ k_j. Each class ⟨B₁^{k₁}···⟩ evolves at Λ = Σ k_j Λ_j with exceptional
// degeneracy Π n_j^{k_j} and diabolical degeneracy k!/Π k_j!; the genuine
// (non-induced) part carries the symmetric-tensor dimension Π C(n_j+k_j−1, k_j).

#pragma once

#include "eigenpoint/model.hpp"
#include "eigenpoint/singularity.hpp"

namespace eigenpoint {

// ----------------------------- spectrum partition -----------------------------

struct PartitionCluster {
    Complex lambda;
    int n{1};  // coalescing-eigenvector count (Jordan block size)
};

struct SpectrumPartition {
    std::vector<PartitionCluster> clusters;  // sorted by (n, Re Λ, Im Λ)
    int total_dim{0};                        // Σ n_j

    int count() const { return static_cast<int>(clusters.size()); }
};

// One partition cluster per Jordan block; diabolically repeated eigenvalues
// therefore yield several clusters with equal Λ.
SpectrumPartition partition_spectrum(const JordanReport& report);

// Partition assembled directly (synthetic spectra, lifted closed forms).
SpectrumPartition make_partition(std::vector<PartitionCluster> clusters);

// ------------------------------- moment classes -------------------------------

struct MomentClass {
    std::vector<int> k_vector;  // composition, one entry per cluster
    int k{0};                   // Σ k_j
    Complex lambda;             // Σ k_j Λ_j
    long long d_e{1};           // combined (genuine + induced) ED
    long long d_d{1};           // combined DD
    long long n_b{1};           // moments in the class = genuine ED
};

// All k-vectors with Σ k_j = k in colexicographic order.
std::vector<MomentClass> moment_classes(const SpectrumPartition& p, int k);

struct MomentCounts {
    long long n_classes{0};   // C(Σ_Λ + k − 1, k)
    long long n_b_total{0};   // Σ over classes of n_b
    long long n_b_expected{0};// C(2n + k − 1, k); equals n_b_total (Vandermonde)
};

MomentCounts moment_counts(const SpectrumPartition& p, int k);

long long binomial(long long n, long long k);

// --------------------------------- table export --------------------------------

struct MomentTableRow {
    std::string label;               // e.g. "<B5 B6>"
    MomentClass cls;
    long long ed_combined{1};        // = cls.d_e
    long long dd_combined{1};        // = cls.d_d
    long long ed_genuine{1};         // = cls.n_b
    long long dd_genuine{1};
    long long dd_combined_total{1};  // Σ d_d over classes sharing (Λ, ED)
    long long dd_genuine_total{1};   // number of classes sharing (Λ, genuine ED)
    std::vector<std::string> monomials;  // distinct moments of the class
    std::vector<long long> orderings;    // operator orderings per monomial
};

struct MomentClassTable {
    int k{1};
    SpectrumPartition partition;
    std::vector<MomentTableRow> rows;
};

// Classifies the spec's dynamical matrix, partitions its spectrum, and lists
// every order-k moment class with combined and genuine degeneracies.
MomentClassTable generate_table(const SystemSpec& spec, int k, const Tolerances& tols = {});

// Table for a prebuilt partition (synthetic spectra).
MomentClassTable generate_table(const SpectrumPartition& partition, int k);

}  // namespace eigenpoint
