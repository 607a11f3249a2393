#include "eigenpoint/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace eigenpoint {

namespace {

void sort_clusters(std::vector<PartitionCluster>& clusters) {
    std::sort(clusters.begin(), clusters.end(),
              [](const PartitionCluster& a, const PartitionCluster& b) {
                  if (a.n != b.n) return a.n < b.n;
                  if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
                  return a.lambda.imag() < b.lambda.imag();
              });
}

long long factorial(int n) {
    long long f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

long long ipow(long long base, int exp) {
    long long r = 1;
    for (int k = 0; k < exp; ++k) r *= base;
    return r;
}

// compositions of k over m slots, colexicographic (reversed tuple compared last-first)
std::vector<std::vector<int>> compositions(int m, int k) {
    std::vector<std::vector<int>> all;
    std::vector<int> cur(m, 0);
    std::function<void(int, int)> rec = [&](int slot, int left) {
        if (slot == m - 1) {
            cur[slot] = left;
            all.push_back(cur);
            return;
        }
        for (int v = left; v >= 0; --v) {
            cur[slot] = v;
            rec(slot + 1, left - v);
        }
    };
    if (m > 0) rec(0, k);
    std::sort(all.begin(), all.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
        for (std::size_t i = a.size(); i-- > 0;) {
            if (a[i] != b[i]) return a[i] < b[i];
        }
        return false;
    });
    return all;
}

// multisets of size k from n symbols, as sorted index tuples
std::vector<std::vector<int>> multisets(int n, int k) {
    std::vector<std::vector<int>> all;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == k) {
            all.push_back(cur);
            return;
        }
        for (int s = start; s < n; ++s) {
            cur.push_back(s);
            rec(s);
            cur.pop_back();
        }
    };
    rec(0);
    return all;
}

}  // namespace

long long binomial(long long n, long long k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

SpectrumPartition partition_spectrum(const JordanReport& report) {
    if (report.dim % 2 != 0)
        throw std::invalid_argument("partition_spectrum: total dimension must be even");
    SpectrumPartition p;
    p.total_dim = report.dim;
    for (const auto& c : report.clusters)
        for (int b : c.block_sizes) p.clusters.push_back({c.eigenvalue, b});
    sort_clusters(p.clusters);
    return p;
}

SpectrumPartition make_partition(std::vector<PartitionCluster> clusters) {
    SpectrumPartition p;
    for (const auto& c : clusters) {
        if (c.n < 1) throw std::invalid_argument("make_partition: cluster sizes must be >= 1");
        p.total_dim += c.n;
    }
    p.clusters = std::move(clusters);
    sort_clusters(p.clusters);
    return p;
}

std::vector<MomentClass> moment_classes(const SpectrumPartition& p, int k) {
    if (k < 1) throw std::invalid_argument("moment_classes: order must be >= 1");
    std::vector<MomentClass> out;
    for (auto& kv : compositions(p.count(), k)) {
        MomentClass c;
        c.k_vector = kv;
        c.k = k;
        c.lambda = 0.0;
        c.d_d = factorial(k);
        for (int j = 0; j < p.count(); ++j) {
            c.lambda += double(kv[j]) * p.clusters[j].lambda;
            c.d_e *= ipow(p.clusters[j].n, kv[j]);
            c.d_d /= factorial(kv[j]);
            c.n_b *= binomial(p.clusters[j].n + kv[j] - 1, kv[j]);
        }
        out.push_back(std::move(c));
    }
    return out;
}

MomentCounts moment_counts(const SpectrumPartition& p, int k) {
    MomentCounts counts;
    counts.n_classes = binomial(p.count() + k - 1, k);
    counts.n_b_expected = binomial(p.total_dim + k - 1, k);
    for (const auto& c : moment_classes(p, k)) counts.n_b_total += c.n_b;
    return counts;
}

MomentClassTable generate_table(const SpectrumPartition& partition, int k) {
    MomentClassTable table;
    table.k = k;
    table.partition = partition;

    for (const auto& cls : moment_classes(partition, k)) {
        MomentTableRow row;
        row.cls = cls;
        row.ed_combined = cls.d_e;
        row.dd_combined = cls.d_d;
        row.ed_genuine = cls.n_b;
        row.dd_genuine = 1;

        std::string label = "<";
        bool first = true;
        for (int j = 0; j < partition.count(); ++j) {
            if (cls.k_vector[j] == 0) continue;
            if (!first) label += " ";
            label += "B" + std::to_string(j + 1);
            if (cls.k_vector[j] > 1) label += "^" + std::to_string(cls.k_vector[j]);
            first = false;
        }
        label += ">";
        row.label = label;

        // distinct monomials of the class: one multiset of member operators per
        // cluster; the ordering count is the number of distinct operator
        // sequences modulo the commutation-equivalent rearrangements
        std::vector<std::vector<std::vector<int>>> choices;
        for (int j = 0; j < partition.count(); ++j)
            if (cls.k_vector[j] > 0)
                choices.push_back(multisets(partition.clusters[j].n, cls.k_vector[j]));
        std::vector<std::pair<std::string, std::vector<int>>> monos = {{"", {}}};
        int choice_idx = 0;
        for (int j = 0; j < partition.count(); ++j) {
            if (cls.k_vector[j] == 0) continue;
            std::vector<std::pair<std::string, std::vector<int>>> grown;
            for (const auto& [name, mult] : monos) {
                for (const auto& pick : choices[choice_idx]) {
                    std::string ext = name;
                    std::vector<int> m2 = mult;
                    int run = 1;
                    for (std::size_t q = 0; q < pick.size(); ++q) {
                        if (q + 1 < pick.size() && pick[q + 1] == pick[q]) {
                            ++run;
                            continue;
                        }
                        if (!ext.empty()) ext += "*";
                        ext += "b" + std::to_string(j + 1) + "." + std::to_string(pick[q] + 1);
                        if (run > 1) ext += "^" + std::to_string(run);
                        m2.push_back(run);
                        run = 1;
                    }
                    grown.emplace_back(ext, m2);
                }
            }
            monos = std::move(grown);
            ++choice_idx;
        }
        for (const auto& [name, mult] : monos) {
            long long orderings = factorial(k);
            for (int m : mult) orderings /= factorial(m);
            row.monomials.push_back(name);
            row.orderings.push_back(orderings);
        }
        table.rows.push_back(std::move(row));
    }

    // totals over classes sharing the eigenfrequency and the same ED; group the
    // frequencies by linkage at a tolerance so that numerically-equal values do
    // not split across a rounding boundary
    const std::size_t nrows = table.rows.size();
    double lam_scale = 1.0;
    for (const auto& row : table.rows) lam_scale = std::max(lam_scale, std::abs(row.cls.lambda));
    const double tol = 1e-6 * lam_scale;
    std::vector<std::size_t> group(nrows);
    for (std::size_t i = 0; i < nrows; ++i) group[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
        while (group[a] != a) a = group[a] = group[group[a]];
        return a;
    };
    for (std::size_t i = 0; i < nrows; ++i)
        for (std::size_t j = i + 1; j < nrows; ++j)
            if (std::abs(table.rows[i].cls.lambda - table.rows[j].cls.lambda) <= tol)
                group[find(i)] = find(j);

    std::map<std::pair<std::size_t, long long>, long long> combined, genuine;
    for (std::size_t i = 0; i < nrows; ++i) {
        const auto& row = table.rows[i];
        combined[{find(i), row.ed_combined}] += row.dd_combined;
        genuine[{find(i), row.ed_genuine}] += 1;
    }
    for (std::size_t i = 0; i < nrows; ++i) {
        auto& row = table.rows[i];
        row.dd_combined_total = combined[{find(i), row.ed_combined}];
        row.dd_genuine_total = genuine[{find(i), row.ed_genuine}];
    }
    return table;
}

MomentClassTable generate_table(const SystemSpec& spec, int k, const Tolerances& tols) {
    const DynamicalMatrix m = build_system(spec);
    const double cluster_tol =
        tols.cluster_tol > 0.0 ? tols.cluster_tol : default_cluster_tol(m.m);
    const JordanReport report = jordan_structure(m.m, tols.rank_tol, cluster_tol);
    return generate_table(partition_spectrum(report), k);
}

}  // namespace eigenpoint
