#include "eigenpoint/spectra.hpp"

#include <cmath>

namespace eigenpoint {

namespace {

// principal branch: Re ≥ 0, and +i·|…| on the negative real axis
Complex principal_sqrt(Complex z) { return std::sqrt(z); }

bool is_concat(const SystemSpec& s, int left, int right) {
    return s.topology == Topology::UniConcat && s.concat && s.concat->left == left &&
           s.concat->right == right && s.concat->kind == CouplingKind::Xi;
}

struct Family {
    enum Kind { Circular4, Tetra4, Chain2, Chain3, Uni11, Uni12, Uni22, Uni23, Uni33, None };
};

Family::Kind family_of(const SystemSpec& s) {
    switch (s.topology) {
        case Topology::Circular4: return Family::Circular4;
        case Topology::Tetrahedral4: return Family::Tetra4;
        case Topology::Chain:
            if (s.n == 2) return Family::Chain2;
            if (s.n == 3) return Family::Chain3;
            return Family::None;
        case Topology::UniConcat:
            if (is_concat(s, 1, 1)) return Family::Uni11;
            if (is_concat(s, 1, 2)) return Family::Uni12;
            if (is_concat(s, 2, 2)) return Family::Uni22;
            if (is_concat(s, 2, 3)) return Family::Uni23;
            if (is_concat(s, 3, 3)) return Family::Uni33;
            return Family::None;
    }
    return Family::None;
}

void require_constraint(const SystemSpec& s, const std::string& name) {
    if (!constraint_satisfied(s, name, 1e-10))
        throw NoClosedForm("analytic_eigensystem: rates do not satisfy '" + name + "'");
}

}  // namespace

XiEigensystem xi_eigensystem(const CouplingParams& c) {
    XiEigensystem out;
    const Complex zeta = c.zeta();
    out.values = {-zeta, zeta};
    if (c.kappa == 0.0) {
        out.vectors[0] << 0.0, 1.0;   // eigenvalue −ε
        out.vectors[1] << 1.0, 0.0;   // eigenvalue +ε
    } else {
        out.vectors[0] << -(c.epsilon - zeta) / c.kappa, 1.0;
        out.vectors[1] << -(c.epsilon + zeta) / c.kappa, 1.0;
    }
    return out;
}

RateAggregates rate_aggregates(const SystemSpec& spec) {
    validate_spec(spec);
    const auto& g = spec.gamma;
    RateAggregates a;
    switch (family_of(spec)) {
        case Family::Circular4:
            a = {(g[0] + g[1]) / 4.0, (g[0] - g[1]) / 4.0, 0.0, 4};
            break;
        case Family::Tetra4:
        case Family::Chain3:
            a = {(g[0] + g[2]) / 4.0, (g[0] - g[2]) / 4.0, 0.0,
                 family_of(spec) == Family::Tetra4 ? 4 : 2};
            break;
        case Family::Chain2:
        case Family::Uni22:
            a = {(g[0] + g[1]) / 4.0, (g[0] - g[1]) / 4.0, 0.0, 1};
            break;
        case Family::Uni11:
            a = {(g[0] + g[1]) / 4.0, (g[0] - g[1]) / 4.0, 0.0, 0};
            break;
        case Family::Uni12:
            a = {(g[1] + g[2]) / 4.0, (g[1] - g[2]) / 4.0, 0.0, 1};
            break;
        case Family::Uni23:
            a = {(g[0] + g[1]) / 4.0, (g[0] - g[1]) / 4.0, (g[2] - g[4]) / 4.0, 1};
            break;
        case Family::Uni33:
            a = {(g[0] + g[2]) / 4.0, (g[0] - g[2]) / 4.0, 0.0, 2};
            break;
        case Family::None:
            throw NoClosedForm("rate_aggregates: no convention for this topology");
    }
    return a;
}

BlockEigenSystem analytic_eigensystem(const SystemSpec& spec) {
    validate_spec(spec);
    const Family::Kind fam = family_of(spec);
    if (fam == Family::None)
        throw NoClosedForm("analytic_eigensystem: topology not cataloged");

    BlockEigenSystem out;
    out.xi = xi_eigensystem(spec.coupling);
    const auto& g = spec.gamma;
    const RateAggregates agg = rate_aggregates(spec);
    const double gp = agg.gamma_plus;
    const double gm = agg.gamma_minus;

    // β depends on ξ only through ξ² = ζ² = ε² − κ², which is exact in real
    // arithmetic; squaring the branch value ζ itself would lose an ulp and
    // smear exact loci
    const Complex xi2(spec.coupling.epsilon * spec.coupling.epsilon -
                          spec.coupling.kappa * spec.coupling.kappa,
                      0.0);
    for (int b = 0; b < 2; ++b) {
        const Complex xi = out.xi.values[b];
        const Complex lam_p = -kI * gp;

        switch (fam) {
            case Family::Circular4: {
                require_constraint(spec, "equal-13-24");
                const Complex beta = principal_sqrt(4.0 * xi2 - gm * gm);
                out.beta = beta;
                out.values[b] = {-kI * g[0] / 2.0, -kI * g[1] / 2.0, lam_p - beta, lam_p + beta};
                const Complex w3 = -(beta + kI * gm) / (2.0 * xi);
                const Complex w4 = (beta - kI * gm) / (2.0 * xi);
                CVector y1(4), y2(4), y3(4), y4(4);
                y1 << -1, 0, 1, 0;
                y2 << 0, -1, 0, 1;
                y3 << w3, 1, w3, 1;
                y4 << w4, 1, w4, 1;
                out.vectors[b] = {y1, y2, y3, y4};
                break;
            }
            case Family::Tetra4: {
                require_constraint(spec, "equal-12-34");
                const Complex beta = principal_sqrt(4.0 * xi2 - gm * gm);
                out.beta = beta;
                out.values[b] = {-kI * g[0] / 2.0 - xi, -kI * g[2] / 2.0 - xi, lam_p + xi - beta,
                                 lam_p + xi + beta};
                const Complex a3 = -(beta + kI * gm) / (2.0 * xi);
                const Complex a4 = (beta - kI * gm) / (2.0 * xi);
                CVector y1(4), y2(4), y3(4), y4(4);
                y1 << -1, 1, 0, 0;
                y2 << 0, 0, -1, 1;
                y3 << a3, a3, 1, 1;
                y4 << a4, a4, 1, 1;
                out.vectors[b] = {y1, y2, y3, y4};
                break;
            }
            case Family::Chain2: {
                const Complex beta = principal_sqrt(xi2 - gm * gm);
                out.beta = beta;
                out.values[b] = {lam_p - beta, lam_p + beta};
                CVector y1(2), y2(2);
                y1 << -(kI * gm + beta) / xi, 1;
                y2 << -(kI * gm - beta) / xi, 1;
                out.vectors[b] = {y1, y2};
                break;
            }
            case Family::Chain3: {
                require_constraint(spec, "mid-mean");
                const Complex beta = principal_sqrt(2.0 * xi2 - gm * gm);
                out.beta = beta;
                out.values[b] = {lam_p, lam_p - beta, lam_p + beta};
                CVector y1(3), y2(3), y3(3);
                y1 << 1, kI * gm / xi, -1;
                const Complex c2 = (kI * gm - beta) / xi;
                const Complex c3 = (kI * gm + beta) / xi;
                y2 << 1, c2, c2 * c2 / 2.0;
                y3 << 1, c3, c3 * c3 / 2.0;
                out.vectors[b] = {y1, y2, y3};
                break;
            }
            case Family::Uni11: {
                out.values[b] = {-kI * g[0] / 2.0, -kI * g[1] / 2.0};
                CVector y1(2), y2(2);
                y1 << -kI * (g[0] - g[1]) / (2.0 * xi), 1;
                y2 << 0, 1;
                out.vectors[b] = {y1, y2};
                break;
            }
            case Family::Uni12: {
                require_constraint(spec, "head-mean");
                const Complex beta = principal_sqrt(xi2 - gm * gm);
                out.beta = beta;
                out.values[b] = {lam_p, lam_p - beta, lam_p + beta};
                CVector y1(3), y2(3), y3(3);
                y1 << -beta * beta / xi2, -kI * gm / xi, 1;
                y2 << 0, (-kI * gm - beta) / xi, 1;
                y3 << 0, (-kI * gm + beta) / xi, 1;
                out.vectors[b] = {y1, y2, y3};
                break;
            }
            case Family::Uni22: {
                require_constraint(spec, "equal-13-24");
                const Complex beta = principal_sqrt(xi2 - gm * gm);
                out.beta = beta;
                out.values[b] = {lam_p - beta, lam_p + beta, lam_p - beta, lam_p + beta};
                break;
            }
            case Family::Uni23: {
                require_constraint(spec, "sum-match");
                const double gmb = agg.gamma_minus_bar;
                const Complex beta = principal_sqrt(xi2 - gm * gm);
                const Complex beta_bar = principal_sqrt(2.0 * xi2 - gmb * gmb);
                out.beta = beta;
                out.beta_bar = beta_bar;
                out.values[b] = {lam_p, lam_p - beta_bar, lam_p + beta_bar, lam_p - beta,
                                 lam_p + beta};
                break;
            }
            case Family::Uni33: {
                require_constraint(spec, "ends-equal");
                const Complex beta = principal_sqrt(2.0 * xi2 - gm * gm);
                out.beta = beta;
                out.values[b] = {lam_p, lam_p, lam_p - beta, lam_p + beta, lam_p - beta,
                                 lam_p + beta};
                break;
            }
            case Family::None: break;
        }
    }
    return out;
}

FullSpectrum lift_full_spectrum(const BlockEigenSystem& block) {
    const std::size_t n = block.values[0].size();
    if (block.values[1].size() != n)
        throw std::invalid_argument("lift_full_spectrum: branch count mismatch");
    const bool with_vectors = !block.vectors[0].empty() && !block.vectors[1].empty();
    if (with_vectors && (block.vectors[0].size() != n || block.vectors[1].size() != n))
        throw std::invalid_argument("lift_full_spectrum: branch count mismatch");

    FullSpectrum out;
    out.values.resize(2 * n);
    if (with_vectors) out.vectors.resize(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (int b = 0; b < 2; ++b) {
            out.values[2 * j + b] = block.values[b][j];
            if (!with_vectors) continue;
            const CVector& y = block.vectors[b][j];
            CVector Y(2 * n);
            for (std::size_t m = 0; m < n; ++m) {
                Y(2 * m) = y(m) * block.xi.vectors[b](0);
                Y(2 * m + 1) = y(m) * block.xi.vectors[b](1);
            }
            out.vectors[2 * j + b] = Y;
        }
    }
    return out;
}

double locus_residual_normalized(const std::string& name, double u, double v) {
    if (name == "ring4") return u * u + v * v / 4.0 - 1.0;
    if (name == "chain2") return u * u + v * v - 1.0;
    if (name == "chain3" || name == "chain3-bar") return u * u + v * v / 2.0 - 1.0;
    if (name == "diff-match") return v;  // caller supplies v = (γ₋ − γ̄₋/√2)/ε
    throw std::invalid_argument("unknown locus: " + name);
}

LocusResidual locus_residual(const SystemSpec& spec, const std::string& name) {
    const RateAggregates agg = rate_aggregates(spec);
    const Family::Kind fam = family_of(spec);
    const double eps = spec.coupling.epsilon;
    if (eps <= 0.0) throw std::invalid_argument("locus_residual: epsilon must be positive");
    const double u = spec.coupling.kappa / eps;

    auto ok = [&](std::initializer_list<Family::Kind> fams) {
        for (auto f : fams)
            if (f == fam) return true;
        return false;
    };

    if (name == "ring4" && ok({Family::Circular4, Family::Tetra4}))
        return {name, locus_residual_normalized(name, u, agg.gamma_minus / eps)};
    if (name == "chain2" && ok({Family::Chain2, Family::Uni12, Family::Uni22, Family::Uni23}))
        return {name, locus_residual_normalized(name, u, agg.gamma_minus / eps)};
    if (name == "chain3" && ok({Family::Chain3, Family::Uni33}))
        return {name, locus_residual_normalized(name, u, agg.gamma_minus / eps)};
    if (name == "chain3-bar" && ok({Family::Uni23}))
        return {name, locus_residual_normalized(name, u, agg.gamma_minus_bar / eps)};
    if (name == "diff-match" && ok({Family::Uni23}))
        return {name, agg.gamma_minus - agg.gamma_minus_bar / std::sqrt(2.0)};
    throw std::invalid_argument("locus '" + name + "' is not defined for this topology");
}

}  // namespace eigenpoint
