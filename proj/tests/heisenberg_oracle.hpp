// Test-only oracle: assembles the dynamical matrix of a quadratic Hamiltonian
// directly from the operator commutators, term by term. Used to pin down the
// coupling insertions of build_system independently of its block shortcuts.

#pragma once

#include "eigenpoint/model.hpp"

#include <vector>

namespace eigenpoint::oracle {

struct Op {
    int mode{0};
    bool dagger{false};

    int index() const { return 2 * mode + (dagger ? 1 : 0); }
};

struct HTerm {
    Complex coeff;
    Op a;
    Op b;  // term = coeff · Ô_a · Ô_b
};

// scalar commutator [Ô_p, Ô_q] for bosonic ladder operators
inline Complex ladder_commutator(const Op& p, const Op& q) {
    if (p.mode != q.mode || p.dagger == q.dagger) return 0.0;
    return p.dagger ? -1.0 : 1.0;  // [a, a†] = 1, [a†, a] = −1
}

// dÔ_p/dt = −i[Ô_p, H] = −i Σ_q M(p, q) Ô_q  →  M(p, q) from the commutators;
// [P, cAB] = c(s(P,B)·A + s(P,A)·B) with scalar s = ladder_commutator
inline Matrix coupling_matrix(int n_modes, const std::vector<HTerm>& hamiltonian) {
    Matrix m = Matrix::Zero(2 * n_modes, 2 * n_modes);
    for (int mode = 0; mode < n_modes; ++mode) {
        for (bool dagger : {false, true}) {
            const Op p{mode, dagger};
            for (const HTerm& term : hamiltonian) {
                m(p.index(), term.a.index()) += term.coeff * ladder_commutator(p, term.b);
                m(p.index(), term.b.index()) += term.coeff * ladder_commutator(p, term.a);
            }
        }
    }
    return m;
}

// ε a_i† a_j + κ a_i a_j + H.c., the bidirectional coupling of one edge
inline void add_bidirectional_edge(std::vector<HTerm>& h, int i, int j, const CouplingParams& c) {
    h.push_back({c.epsilon, {i, true}, {j, false}});
    h.push_back({c.epsilon, {j, true}, {i, false}});
    h.push_back({c.kappa, {i, false}, {j, false}});
    h.push_back({c.kappa, {i, true}, {j, true}});
}

// ε a_i a_j† + κ a_i a_j (no Hermitian conjugate)
inline void add_one_way_edge_1(std::vector<HTerm>& h, int i, int j, const CouplingParams& c) {
    h.push_back({c.epsilon, {i, false}, {j, true}});
    h.push_back({c.kappa, {i, false}, {j, false}});
}

// ε a_i a_j† + κ a_i† a_j† (no Hermitian conjugate)
inline void add_one_way_edge_2(std::vector<HTerm>& h, int i, int j, const CouplingParams& c) {
    h.push_back({c.epsilon, {i, false}, {j, true}});
    h.push_back({c.kappa, {i, true}, {j, true}});
}

// full oracle matrix: Hamiltonian couplings plus the −iγ/2 damping diagonal
inline Matrix dynamical_matrix(int n_modes, const std::vector<HTerm>& hamiltonian,
                               const std::vector<double>& gamma) {
    Matrix m = coupling_matrix(n_modes, hamiltonian);
    for (int j = 0; j < n_modes; ++j) {
        m(2 * j, 2 * j) += -kI * gamma[j] / 2.0;
        m(2 * j + 1, 2 * j + 1) += -kI * gamma[j] / 2.0;
    }
    return m;
}

}  // namespace eigenpoint::oracle
