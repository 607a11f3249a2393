#include "eigenpoint/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace eigenpoint {

namespace {

// couplings of the bidirectional topologies as mode-index pairs (i < j)
std::vector<std::pair<int, int>> bidirectional_edges(const SystemSpec& spec) {
    std::vector<std::pair<int, int>> edges;
    switch (spec.topology) {
        case Topology::Circular4:
            edges = {{0, 1}, {1, 2}, {2, 3}, {0, 3}};
            break;
        case Topology::Tetrahedral4:
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j) edges.emplace_back(i, j);
            break;
        case Topology::Chain:
            for (int j = 0; j + 1 < spec.n; ++j) edges.emplace_back(j, j + 1);
            break;
        case Topology::UniConcat:
            break;
    }
    return edges;
}

std::vector<std::pair<int, int>> concat_edges(const ConcatSpec& c) {
    if (!c.edges.empty()) return c.edges;
    return {{c.left, 1}};
}

// one-way edge i → j generated by H = ε a_i a_j† + κ a_i a_j, written into the
// interleaved-basis matrix rows of (a_j, a_j†) and (a_i†)
void insert_hamiltonian1(Matrix& m, int i, int j, const CouplingParams& c) {
    m(2 * j, 2 * i) += c.epsilon;        // a_j ← a_i
    m(2 * j + 1, 2 * i) += -c.kappa;     // a_j† ← a_i
    m(2 * i + 1, 2 * j) += -c.kappa;     // a_i† ← a_j
    m(2 * i + 1, 2 * j + 1) += -c.epsilon;
}

// one-way edge i → j generated by H = ε a_i a_j† + κ a_i† a_j†
void insert_hamiltonian2(Matrix& m, int i, int j, const CouplingParams& c) {
    m(2 * j, 2 * i) += c.epsilon;        // a_j ← a_i
    m(2 * j, 2 * i + 1) += c.kappa;      // a_j ← a_i†
    m(2 * i, 2 * j + 1) += c.kappa;      // a_i ← a_j†
    m(2 * i + 1, 2 * j + 1) += -c.epsilon;
}

struct ConstraintDef {
    std::function<bool(const SystemSpec&)> applies;
    std::function<void(std::vector<double>&)> overwrite;
};

bool is_concat(const SystemSpec& s, int left, int right) {
    return s.topology == Topology::UniConcat && s.concat && s.concat->left == left &&
           s.concat->right == right;
}

const std::vector<std::pair<std::string, ConstraintDef>>& constraint_registry() {
    static const std::vector<std::pair<std::string, ConstraintDef>> reg = {
        {"equal-13-24",
         {[](const SystemSpec& s) {
              return s.topology == Topology::Circular4 || is_concat(s, 2, 2);
          },
          [](std::vector<double>& g) {
              g[2] = g[0];
              g[3] = g[1];
          }}},
        {"equal-12-34",
         {[](const SystemSpec& s) { return s.topology == Topology::Tetrahedral4; },
          [](std::vector<double>& g) {
              g[1] = g[0];
              g[3] = g[2];
          }}},
        {"equal-rates",
         {[](const SystemSpec& s) { return s.n == 2; },
          [](std::vector<double>& g) { g[0] = g[1]; }}},
        {"damp-amp",
         {[](const SystemSpec& s) { return s.n == 2; },
          [](std::vector<double>& g) { g[1] = -g[0]; }}},
        {"head-mean",
         {[](const SystemSpec& s) { return is_concat(s, 1, 2); },
          [](std::vector<double>& g) { g[0] = 0.5 * (g[1] + g[2]); }}},
        {"mid-mean",
         {[](const SystemSpec& s) { return s.topology == Topology::Chain && s.n == 3; },
          [](std::vector<double>& g) { g[1] = 0.5 * (g[0] + g[2]); }}},
        {"sum-match",
         {[](const SystemSpec& s) { return is_concat(s, 2, 3); },
          [](std::vector<double>& g) {
              const double sum = g[2] + g[4];
              const double diff = g[0] - g[1];
              g[0] = 0.5 * (sum + diff);
              g[1] = 0.5 * (sum - diff);
              g[3] = 0.5 * sum;
          }}},
        {"diff-match",
         {[](const SystemSpec& s) { return is_concat(s, 2, 3); },
          [](std::vector<double>& g) {
              const double sum = g[0] + g[1];
              const double diff_bar = g[2] - g[4];
              const double diff = diff_bar / std::sqrt(2.0);
              g[0] = 0.5 * (sum + diff);
              g[1] = 0.5 * (sum - diff);
          }}},
        {"ends-equal",
         {[](const SystemSpec& s) { return is_concat(s, 3, 3); },
          [](std::vector<double>& g) {
              g[3] = g[0];
              g[5] = g[2];
              g[1] = g[4] = 0.5 * (g[0] + g[2]);
          }}},
    };
    return reg;
}

const ConstraintDef& lookup_constraint(const std::string& name) {
    for (const auto& [key, def] : constraint_registry())
        if (key == name) return def;
    throw std::invalid_argument("unknown constraint: " + name);
}

}  // namespace

void validate_spec(const SystemSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("SystemSpec: n must be >= 1");
    if (spec.coupling.epsilon < 0.0 || spec.coupling.kappa < 0.0)
        throw std::invalid_argument("SystemSpec: coupling strengths must be nonnegative");
    if (static_cast<int>(spec.gamma.size()) != spec.n)
        throw std::invalid_argument("SystemSpec: rate list length does not match mode count");
    if ((spec.topology == Topology::Circular4 || spec.topology == Topology::Tetrahedral4) &&
        spec.n != 4)
        throw std::invalid_argument("SystemSpec: four-mode topology requires n == 4");
    if (spec.topology == Topology::UniConcat) {
        if (!spec.concat) throw std::invalid_argument("SystemSpec: UniConcat requires a concat block");
        const ConcatSpec& c = *spec.concat;
        if (c.left < 1 || c.right < 1)
            throw std::invalid_argument("SystemSpec: concat parts must have at least one mode");
        if (c.left + c.right != spec.n)
            throw std::invalid_argument("SystemSpec: concat part sizes must sum to n");
        for (const auto& [l, r] : concat_edges(c)) {
            if (l < 1 || l > c.left || r < 1 || r > c.right)
                throw std::invalid_argument("SystemSpec: concat edge references a nonexistent mode");
        }
    } else if (spec.concat) {
        throw std::invalid_argument("SystemSpec: concat block only valid for UniConcat");
    }
}

DynamicalMatrix build_system(const SystemSpec& spec) {
    validate_spec(spec);
    const int n = spec.n;
    DynamicalMatrix out;
    out.modes = n;
    out.reduced = false;
    out.m = Matrix::Zero(2 * n, 2 * n);

    for (int j = 0; j < n; ++j) {
        const Complex d = -kI * (spec.gamma[j] / 2.0);
        out.m(2 * j, 2 * j) = d;
        out.m(2 * j + 1, 2 * j + 1) = d;
    }

    const Eigen::Matrix2cd xi = spec.coupling.xi();
    auto place_xi = [&](int bi, int bj) {
        out.m.block<2, 2>(2 * bi, 2 * bj) += xi;
        out.coupling_blocks.emplace_back(bi, bj);
    };

    if (spec.topology == Topology::UniConcat) {
        const ConcatSpec& c = *spec.concat;
        // each part is a bidirectional chain
        for (int j = 0; j + 1 < c.left; ++j) {
            place_xi(j, j + 1);
            place_xi(j + 1, j);
        }
        for (int j = 0; j + 1 < c.right; ++j) {
            place_xi(c.left + j, c.left + j + 1);
            place_xi(c.left + j + 1, c.left + j);
        }
        for (const auto& [l, r] : concat_edges(c)) {
            const int i = l - 1;
            const int j = c.left + r - 1;
            switch (c.kind) {
                case CouplingKind::Xi: place_xi(j, i); break;
                case CouplingKind::Hamiltonian1: insert_hamiltonian1(out.m, i, j, spec.coupling); break;
                case CouplingKind::Hamiltonian2: insert_hamiltonian2(out.m, i, j, spec.coupling); break;
            }
        }
    } else {
        for (const auto& [i, j] : bidirectional_edges(spec)) {
            place_xi(i, j);
            place_xi(j, i);
        }
    }
    return out;
}

DynamicalMatrix build_reduced(const SystemSpec& spec, Complex xi) {
    validate_spec(spec);
    if (spec.topology == Topology::UniConcat && spec.concat->kind != CouplingKind::Xi)
        throw std::invalid_argument("build_reduced: only Xi-kind couplings have a reduced form");
    const int n = spec.n;
    DynamicalMatrix out;
    out.modes = n;
    out.reduced = true;
    out.m = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) out.m(j, j) = -kI * (spec.gamma[j] / 2.0);

    auto place = [&](int i, int j) {
        out.m(i, j) += xi;
        out.coupling_blocks.emplace_back(i, j);
    };
    if (spec.topology == Topology::UniConcat) {
        const ConcatSpec& c = *spec.concat;
        for (int j = 0; j + 1 < c.left; ++j) {
            place(j, j + 1);
            place(j + 1, j);
        }
        for (int j = 0; j + 1 < c.right; ++j) {
            place(c.left + j, c.left + j + 1);
            place(c.left + j + 1, c.left + j);
        }
        for (const auto& [l, r] : concat_edges(c)) place(c.left + r - 1, l - 1);
    } else {
        for (const auto& [i, j] : bidirectional_edges(spec)) {
            place(i, j);
            place(j, i);
        }
    }
    return out;
}

SystemSpec apply_constraint(const SystemSpec& spec, const std::string& name) {
    validate_spec(spec);
    const ConstraintDef& def = lookup_constraint(name);
    if (!def.applies(spec))
        throw std::invalid_argument("constraint '" + name + "' does not apply to this topology");
    SystemSpec out = spec;
    def.overwrite(out.gamma);
    out.constraint = name;
    return out;
}

std::vector<std::string> applicable_constraints(const SystemSpec& spec) {
    std::vector<std::string> names;
    for (const auto& [key, def] : constraint_registry())
        if (def.applies(spec)) names.push_back(key);
    return names;
}

bool constraint_satisfied(const SystemSpec& spec, const std::string& name, double tol) {
    const ConstraintDef& def = lookup_constraint(name);
    if (!def.applies(spec)) return false;
    std::vector<double> g = spec.gamma;
    def.overwrite(g);
    double scale = 0.0;
    for (double v : spec.gamma) scale = std::max(scale, std::abs(v));
    scale = std::max(scale, 1.0);
    for (std::size_t j = 0; j < g.size(); ++j)
        if (std::abs(g[j] - spec.gamma[j]) > tol * scale) return false;
    return true;
}

DynamicalMatrix perturb(const DynamicalMatrix& M, const PerturbSite& site, double delta) {
    if (!std::isfinite(delta)) throw std::invalid_argument("perturb: delta must be finite");
    DynamicalMatrix out = M;
    const int d = M.dim();
    switch (site.kind) {
        case PerturbSite::Kind::Entry:
            if (site.i < 0 || site.i >= d || site.j < 0 || site.j >= d)
                throw std::out_of_range("perturb: entry selector out of range");
            out.m(site.i, site.j) += delta;
            break;
        case PerturbSite::Kind::CouplingEntry: {
            if (M.reduced)
                throw std::invalid_argument("perturb: coupling-entry site needs the full matrix");
            if (site.i < 0 || site.i > 1 || site.j < 0 || site.j > 1)
                throw std::out_of_range("perturb: coupling-entry selector out of range");
            if (M.coupling_blocks.empty())
                throw std::invalid_argument("perturb: matrix has no shared coupling blocks");
            for (const auto& [bi, bj] : M.coupling_blocks)
                out.m(2 * bi + site.i, 2 * bj + site.j) += delta;
            break;
        }
        case PerturbSite::Kind::RateEntry: {
            if (M.reduced)
                throw std::invalid_argument("perturb: rate-entry site needs the full matrix");
            if (site.mode < 0 || site.mode >= M.modes)
                throw std::out_of_range("perturb: rate-entry mode out of range");
            if (site.i < 0 || site.i > 1 || site.j < 0 || site.j > 1)
                throw std::out_of_range("perturb: rate-entry selector out of range");
            // the rate block enters the matrix as −i·γ̃
            out.m(2 * site.mode + site.i, 2 * site.mode + site.j) += -kI * delta;
            break;
        }
    }
    return out;
}

}  // namespace eigenpoint
