#include "eigenpoint/singularity.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace eigenpoint {

namespace {

double norm2(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

void require_finite(const Matrix& m) {
    if (!m.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
}

std::vector<Complex> solve_eigenvalues(const Matrix& m, Matrix* vectors = nullptr) {
    require_finite(m);
    Eigen::ComplexEigenSolver<Matrix> solver(m, vectors != nullptr);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigensolver failed to converge");
    std::vector<Complex> vals(m.rows());
    for (int i = 0; i < m.rows(); ++i) vals[i] = solver.eigenvalues()(i);
    if (vectors) *vectors = solver.eigenvectors();
    return vals;
}

// rank against an absolute threshold, with a 10× gap guard around the cut
int rank_with_gap_check(const Matrix& m, double tau) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    int r = 0;
    while (r < sv.size() && sv(r) > tau) ++r;
    if (r > 0 && r < sv.size() && sv(r) > 0.0) {
        if (sv(r - 1) / sv(r) < 10.0)
            throw Indeterminate("rank decision ill-conditioned; adjust rank tolerance");
    }
    return r;
}

// orthonormal basis of the null space of m at threshold tau
Matrix nullspace(const Matrix& m, double tau) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int r = 0;
    while (r < sv.size() && sv(r) > tau) ++r;
    return svd.matrixV().rightCols(m.cols() - r);
}

// minimum-cost matching of perturbed onto unperturbed eigenvalues (bitmask DP;
// dimensions stay ≤ 12 so the exhaustive optimum is cheap and tie-stable)
std::vector<int> match_eigenvalues(const std::vector<Complex>& from,
                                   const std::vector<Complex>& to) {
    const int n = static_cast<int>(from.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(std::size_t(1) << n, inf);
    std::vector<int> choice(std::size_t(1) << n, -1);
    dp[0] = 0.0;
    for (std::size_t mask = 0; mask < dp.size(); ++mask) {
        if (dp[mask] == inf) continue;
        const int i = __builtin_popcountll(mask);  // next "from" index to place
        if (i == n) continue;
        for (int j = 0; j < n; ++j) {
            if (mask & (std::size_t(1) << j)) continue;
            const std::size_t next = mask | (std::size_t(1) << j);
            const double cost = dp[mask] + std::abs(from[i] - to[j]);
            if (cost < dp[next]) {
                dp[next] = cost;
                choice[next] = j;
            }
        }
    }
    std::vector<int> assign(n, -1);
    std::size_t mask = (std::size_t(1) << n) - 1;
    for (int i = n - 1; i >= 0; --i) {
        const int j = choice[mask];
        assign[i] = j;
        mask ^= std::size_t(1) << j;
    }
    return assign;  // assign[i] = index in `to` for from[i]
}

}  // namespace

double default_cluster_tol(const Matrix& m) { return 1e-7 * std::max(norm2(m), 1e-300); }

std::vector<EigenCluster> numeric_eigensystem(const Matrix& m, double cluster_tol) {
    if (cluster_tol <= 0.0) throw std::invalid_argument("cluster_tol must be positive");
    const std::vector<Complex> vals = solve_eigenvalues(m);
    const int n = static_cast<int>(vals.size());

    // single-linkage clustering via union-find
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(vals[i] - vals[j]) <= cluster_tol) parent[find(i)] = find(j);

    std::vector<EigenCluster> clusters;
    std::vector<int> root_of(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = find(i);
        int idx = root_of[r];
        if (idx < 0) {
            idx = static_cast<int>(clusters.size());
            root_of[r] = idx;
            clusters.emplace_back();
        }
        clusters[idx].members.push_back(i);
        clusters[idx].values.push_back(vals[i]);
    }
    for (auto& c : clusters) {
        Complex sum = 0.0;
        for (const Complex& v : c.values) sum += v;
        c.mean = sum / static_cast<double>(c.values.size());
    }
    std::sort(clusters.begin(), clusters.end(), [](const EigenCluster& a, const EigenCluster& b) {
        if (a.mean.real() != b.mean.real()) return a.mean.real() < b.mean.real();
        return a.mean.imag() < b.mean.imag();
    });

    // invariant subspace of each cluster: null((M − λI)^mult)
    const double scale = norm2(m);
    for (auto& c : clusters) {
        Matrix shifted = m - c.mean * Matrix::Identity(n, n);
        const double base = std::max(norm2(shifted), 1e-300);
        Matrix power = Matrix::Identity(n, n);
        for (std::size_t k = 0; k < c.values.size(); ++k) power = power * shifted;
        const double tau = 1e-9 * std::max(std::pow(base, double(c.values.size())), scale * 1e-6);
        c.subspace = nullspace(power, tau);
    }
    return clusters;
}

int JordanReport::max_block() const {
    int best = 0;
    for (const auto& c : clusters)
        for (int b : c.block_sizes) best = std::max(best, b);
    return best;
}

namespace {

// staircase for one cluster; throws Indeterminate when the ranks do not close
// exactly at the cluster's algebraic multiplicity
JordanCluster staircase(const Matrix& m, const EigenCluster& cl, double rank_tol) {
    const int n = static_cast<int>(m.rows());
    JordanCluster jc;
    jc.eigenvalue = cl.mean;
    jc.multiplicity = static_cast<int>(cl.values.size());

    const Matrix shifted = m - cl.mean * Matrix::Identity(n, n);
    const double base = std::max(norm2(shifted), 1e-300);
    std::vector<int> ranks{n};
    Matrix power = Matrix::Identity(n, n);
    for (int k = 1; k <= jc.multiplicity; ++k) {
        power = power * shifted;
        const int r = rank_with_gap_check(power, rank_tol * std::pow(base, double(k)));
        ranks.push_back(r);
        if (r <= n - jc.multiplicity) break;
    }
    if (ranks.back() != n - jc.multiplicity)
        throw Indeterminate("rank staircase does not close at the cluster multiplicity");
    // the staircase must be flat past the closure point, otherwise this
    // "cluster" is a fragment of a larger smeared one
    {
        const int depth_so_far = static_cast<int>(ranks.size()) - 1;
        power = power * shifted;
        const int beyond =
            rank_with_gap_check(power, rank_tol * std::pow(base, double(depth_so_far + 1)));
        if (beyond != ranks.back())
            throw Indeterminate("rank staircase keeps dropping past the cluster multiplicity");
    }

    const int depth = static_cast<int>(ranks.size()) - 1;  // max block size
    std::vector<int> ge(depth + 2, 0);                     // blocks of size ≥ k
    for (int k = 1; k <= depth; ++k) ge[k] = ranks[k - 1] - ranks[k];
    for (int s = depth; s >= 1; --s)
        for (int c = 0; c < ge[s] - ge[s + 1]; ++c) jc.block_sizes.push_back(s);
    std::sort(jc.block_sizes.rbegin(), jc.block_sizes.rend());
    if (std::accumulate(jc.block_sizes.begin(), jc.block_sizes.end(), 0) != jc.multiplicity)
        throw Indeterminate("Jordan block sizes do not sum to the cluster multiplicity");
    return jc;
}

}  // namespace

JordanReport jordan_structure(const Matrix& m, double rank_tol, double cluster_tol) {
    require_finite(m);
    if (rank_tol <= 0.0) throw std::invalid_argument("rank_tol must be positive");
    const int n = static_cast<int>(m.rows());
    const double scale = std::max(norm2(m), 1e-300);
    double tol = cluster_tol > 0.0 ? cluster_tol : default_cluster_tol(m);

    // Computed eigenvalues of a size-p Jordan block scatter like ε^(1/p), far
    // beyond any fixed clustering tolerance, while the rank staircase stays
    // ulp-accurate. Escalate the clustering until every cluster's staircase
    // closes at its own multiplicity; a fragmented cluster cannot.
    JordanReport report;
    report.dim = n;
    for (;;) {
        report.clusters.clear();
        try {
            for (const auto& cl : numeric_eigensystem(m, tol))
                report.clusters.push_back(staircase(m, cl, rank_tol));
            report.cluster_tol_used = tol;
            break;
        } catch (const Indeterminate&) {
            if (tol * 10.0 > 2e-2 * scale) throw;
            tol *= 10.0;
        }
    }

    // similarity transform from generalized-eigenvector chains; its condition
    // number is reported as evidence, the block sizes above stand on their own
    Matrix S(n, n);
    Matrix J = Matrix::Zero(n, n);
    int col = 0;
    bool chains_ok = true;
    for (const auto& jc : report.clusters) {
        const Matrix shifted = m - jc.eigenvalue * Matrix::Identity(n, n);
        const double base = std::max(norm2(shifted), 1e-300);
        const int depth = jc.block_sizes.empty() ? 0 : jc.block_sizes.front();
        std::vector<Matrix> kernels(depth + 1);
        kernels[0] = Matrix(n, 0);
        Matrix power = Matrix::Identity(n, n);
        for (int k = 1; k <= depth; ++k) {
            power = power * shifted;
            kernels[k] = nullspace(power, rank_tol * std::pow(base, double(k)));
        }
        std::vector<std::pair<int, CVector>> chosen;  // (block size, generator)
        for (int b : jc.block_sizes) {
            Matrix excl(n, 0);
            auto append = [&](const Matrix& cols) {
                Matrix grown(n, excl.cols() + cols.cols());
                grown << excl, cols;
                excl = grown;
            };
            append(kernels[b - 1]);
            for (const auto& [b2, v2] : chosen) {
                if (b2 < b) continue;
                CVector w = v2;
                for (int k = 0; k < b2 - b; ++k) w = shifted * w;
                append(w);
            }
            // candidate with the largest component outside the excluded span
            Eigen::HouseholderQR<Matrix> qr(excl);
            Matrix q = excl.cols() > 0 ? Matrix(qr.householderQ() * Matrix::Identity(n, static_cast<int>(excl.cols())))
                                       : Matrix(n, 0);
            CVector best;
            double best_norm = -1.0;
            for (int c = 0; c < kernels[b].cols(); ++c) {
                CVector cand = kernels[b].col(c);
                if (q.cols() > 0) cand -= q * (q.adjoint() * cand);
                if (cand.norm() > best_norm) {
                    best_norm = cand.norm();
                    best = cand;
                }
            }
            if (best_norm < 1e-8) {
                chains_ok = false;
                break;
            }
            best /= best.norm();
            chosen.emplace_back(b, best);
            std::vector<CVector> chain(b);
            chain[b - 1] = best;
            for (int k = b - 2; k >= 0; --k) chain[k] = shifted * chain[k + 1];
            for (int k = 0; k < b; ++k) {
                S.col(col + k) = chain[k];
                J(col + k, col + k) = jc.eigenvalue;
                if (k + 1 < b) J(col + k, col + k + 1) = 1.0;
            }
            col += b;
        }
        if (!chains_ok) break;
    }
    const double inf = std::numeric_limits<double>::infinity();
    if (chains_ok && col == n) {
        const double resid = (m * S - S * J).norm();
        if (resid <= 1e-6 * std::max(1.0, m.norm()) * S.norm()) {
            Eigen::JacobiSVD<Matrix> svd(S);
            const auto& sv = svd.singularValues();
            report.similarity_condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : inf;
        } else {
            report.similarity_condition = inf;
        }
    } else {
        report.similarity_condition = inf;
    }
    return report;
}

std::vector<double> DeltaGrid::values() const {
    if (steps < 2 || min <= 0.0 || max <= min)
        throw std::invalid_argument("DeltaGrid: need min < max, both positive, steps >= 2");
    std::vector<double> v(steps);
    const double ratio = std::log(max / min) / (steps - 1);
    for (int k = 0; k < steps; ++k) v[k] = min * std::exp(ratio * k);
    return v;
}

ScanResult perturbation_scan(const DynamicalMatrix& m, const PerturbSite& site,
                             const DeltaGrid& grid, double cluster_tol) {
    const double scale = std::max(norm2(m.m), 1e-300);

    // defect-aware clustering: take the tolerance the validated Jordan
    // staircase settled on, so smeared high-order clusters stay together
    const JordanReport jordan = jordan_structure(m.m, 1e-9, cluster_tol);
    const std::vector<Complex> base_vals = solve_eigenvalues(m.m);
    const std::vector<EigenCluster> clusters = numeric_eigensystem(m.m, jordan.cluster_tol_used);
    const EigenCluster* tracked = &clusters.front();
    for (const auto& c : clusters)
        if (c.members.size() > tracked->members.size()) tracked = &c;

    // splittings are only meaningful above the solver's own scatter on the
    // unperturbed cluster
    double baseline = 0.0;
    for (std::size_t a = 0; a < tracked->members.size(); ++a)
        for (std::size_t b = a + 1; b < tracked->members.size(); ++b)
            baseline = std::max(
                baseline, std::abs(base_vals[tracked->members[a]] - base_vals[tracked->members[b]]));
    const double floor = std::max(1e-12 * scale, 3.0 * baseline);

    ScanResult out;
    out.cluster_mean = tracked->mean;
    out.cluster_members = tracked->members;
    out.deltas = grid.values();

    for (double delta : out.deltas) {
        const DynamicalMatrix pm = perturb(m, site, delta);
        Matrix vectors;
        const std::vector<Complex> pvals = solve_eigenvalues(pm.m, &vectors);
        const std::vector<int> assign = match_eigenvalues(pvals, base_vals);

        std::vector<Complex> matched(base_vals.size());
        std::vector<int> matched_col(base_vals.size());
        for (std::size_t i = 0; i < pvals.size(); ++i) {
            matched[assign[i]] = pvals[i];
            matched_col[assign[i]] = static_cast<int>(i);
        }
        out.tracks.push_back(matched);

        double split = 0.0;
        for (std::size_t a = 0; a < tracked->members.size(); ++a)
            for (std::size_t b = a + 1; b < tracked->members.size(); ++b)
                split = std::max(split, std::abs(matched[tracked->members[a]] -
                                                 matched[tracked->members[b]]));
        out.splittings.push_back(split);

        double overlap = 0.0;
        for (std::size_t a = 0; a < tracked->members.size(); ++a) {
            for (std::size_t b = a + 1; b < tracked->members.size(); ++b) {
                const CVector ya = vectors.col(matched_col[tracked->members[a]]);
                const CVector yb = vectors.col(matched_col[tracked->members[b]]);
                overlap = std::max(overlap, std::abs(ya.dot(yb)) / (ya.norm() * yb.norm()));
            }
        }
        out.overlaps.push_back(overlap);
    }

    // keep points above the floating-point floor, demand roughly monotone growth
    std::vector<int> kept;
    for (std::size_t k = 0; k < out.splittings.size(); ++k)
        if (out.splittings[k] > floor) kept.push_back(static_cast<int>(k));
    for (std::size_t k = 1; k < kept.size(); ++k)
        if (out.splittings[kept[k]] < 0.5 * out.splittings[kept[k - 1]])
            throw Indeterminate("non-monotone eigenvalue splitting across the delta grid");

    // least-squares slope over the inner half of the kept grid
    const std::size_t nk = kept.size();
    if (nk >= 2) {
        const std::size_t lo = nk / 4;
        const std::size_t hi = nk - nk / 4;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (std::size_t k = lo; k < hi; ++k) {
            const double x = std::log(out.deltas[kept[k]]);
            const double y = std::log(out.splittings[kept[k]]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++cnt;
        }
        if (cnt >= 2 && sxx * cnt - sx * sx > 0.0)
            out.slope = (sxy * cnt - sx * sy) / (sxx * cnt - sx * sx);
    }

    // branches that actually left their unperturbed position at the top delta
    if (!out.tracks.empty()) {
        const auto& last = out.tracks.back();
        for (int idx : tracked->members)
            if (std::abs(last[idx] - base_vals[idx]) > 1e3 * floor) ++out.moving_branches;
    }
    return out;
}

std::string to_string(PointKind k) {
    switch (k) {
        case PointKind::Regular: return "regular";
        case PointKind::QEP: return "QEP";
        case PointKind::QDP: return "QDP";
        case PointKind::QHP: return "QHP";
    }
    return "regular";
}

SingularityReport classify(const DynamicalMatrix& m, const Tolerances& tols,
                           const DeltaGrid& grid) {
    const double cluster_tol =
        tols.cluster_tol > 0.0 ? tols.cluster_tol : default_cluster_tol(m.m);
    SingularityReport rep;
    rep.jordan = jordan_structure(m.m, tols.rank_tol, cluster_tol);

    const JordanCluster* dominant = nullptr;
    for (const auto& c : rep.jordan.clusters) {
        if (!dominant) {
            dominant = &c;
            continue;
        }
        const int ed_c = c.block_sizes.front();
        const int ed_d = dominant->block_sizes.front();
        if (ed_c > ed_d || (ed_c == ed_d && c.multiplicity > dominant->multiplicity))
            dominant = &c;
    }
    rep.eigenvalue = dominant->eigenvalue;
    rep.ed_order = dominant->block_sizes.front();
    rep.dd_order = static_cast<int>(std::count(dominant->block_sizes.begin(),
                                               dominant->block_sizes.end(), rep.ed_order));
    if (rep.ed_order >= 2)
        rep.kind = rep.dd_order >= 2 ? PointKind::QHP : PointKind::QEP;
    else
        rep.kind = rep.dd_order >= 2 ? PointKind::QDP : PointKind::Regular;

    // corroborating evidence; the classification above stands on the Jordan data
    try {
        const PerturbSite probe = PerturbSite::entry(0, std::max(0, m.dim() - 2));
        const ScanResult scan = perturbation_scan(m, probe, grid, cluster_tol);
        rep.slope = scan.slope;
        rep.min_overlap = 1.0;
        for (double f : scan.overlaps) rep.min_overlap = std::min(rep.min_overlap, f);
    } catch (const std::exception&) {
        rep.slope = std::numeric_limits<double>::quiet_NaN();
        rep.min_overlap = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

}  // namespace eigenpoint
