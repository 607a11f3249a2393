#include "eigenpoint/moments.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace eigenpoint;

namespace {

// circular ring on its coalescence locus (dyadic parameters, exact degeneracy)
SystemSpec ring_on_locus() {
    SystemSpec s;
    s.topology = Topology::Circular4;
    s.n = 4;
    s.coupling = CouplingParams(1.25, 0.75);
    s.gamma = {4.5, -3.5, 0, 0};
    return apply_constraint(s, "equal-13-24");
}

const MomentTableRow& row_for(const MomentClassTable& table, const std::string& label) {
    for (const auto& r : table.rows)
        if (r.label == label) return r;
    REQUIRE_MESSAGE(false, ("missing row " + label).c_str());
    return table.rows.front();
}

// all degree-k monomials in `ops` symbols, counted as multisets
long long brute_force_monomials(int ops, int k) {
    std::vector<std::vector<int>> stack{{}};
    long long count = 0;
    std::function<void(int, int)> rec = [&](int start, int left) {
        if (left == 0) {
            ++count;
            return;
        }
        for (int s = start; s < ops; ++s) rec(s, left - 1);
    };
    rec(0, k);
    return count;
}

}  // namespace

TEST_CASE("spectrum partition of the ring on its locus") {
    const JordanReport rep = jordan_structure(build_system(ring_on_locus()).m);
    const SpectrumPartition p = partition_spectrum(rep);
    REQUIRE(p.count() == 6);
    CHECK(p.total_dim == 8);
    for (int j = 0; j < 4; ++j) CHECK(p.clusters[j].n == 1);
    CHECK(p.clusters[4].n == 2);
    CHECK(p.clusters[5].n == 2);
    // the two big clusters sit at the common rate -i gamma+
    CHECK(std::abs(p.clusters[4].lambda - Complex(0, -0.25)) < 1e-7);
    CHECK(std::abs(p.clusters[5].lambda - Complex(0, -0.25)) < 1e-7);
}

TEST_CASE("fully non-degenerate spectra partition into singletons") {
    SystemSpec s;
    s.topology = Topology::Chain;
    s.n = 2;
    s.coupling = CouplingParams(1.0, 0.3);
    s.gamma = {0.9, 0.1};
    const SpectrumPartition p = partition_spectrum(jordan_structure(build_system(s).m));
    CHECK(p.count() == 4);
    for (const auto& c : p.clusters) CHECK(c.n == 1);
}

TEST_CASE("moment classes of the ring partition at order 2") {
    const SpectrumPartition p = partition_spectrum(jordan_structure(build_system(ring_on_locus()).m));
    const std::vector<MomentClass> classes = moment_classes(p, 2);
    CHECK(static_cast<long long>(classes.size()) == binomial(7, 2));  // 21

    std::map<std::vector<int>, const MomentClass*> by_kvec;
    for (const auto& c : classes) by_kvec[c.k_vector] = &c;

    const MomentClass& mixed = *by_kvec.at({0, 0, 0, 0, 1, 1});
    CHECK(std::abs(mixed.lambda - Complex(0, -0.5)) < 1e-7);  // 2 gamma+
    CHECK(mixed.d_e == 4);
    CHECK(mixed.d_d == 2);
    CHECK(mixed.n_b == 4);

    const MomentClass& square = *by_kvec.at({0, 0, 0, 0, 2, 0});
    CHECK(square.d_e == 4);
    CHECK(square.d_d == 1);
    CHECK(square.n_b == 3);
}

TEST_CASE("all-singleton partitions have unit exceptional degeneracy") {
    const SpectrumPartition p = make_partition(
        {{Complex(0, -1), 1}, {Complex(0, -2), 1}, {Complex(0, -3), 1}, {Complex(1, -1), 1}});
    for (const auto& c : moment_classes(p, 3)) CHECK(c.d_e == 1);
}

TEST_CASE("moment counts") {
    SUBCASE("class count is the stars-and-bars number") {
        const SpectrumPartition p = partition_spectrum(jordan_structure(build_system(ring_on_locus()).m));
        const MomentCounts counts = moment_counts(p, 2);
        CHECK(counts.n_classes == 21);
        CHECK(static_cast<long long>(moment_classes(p, 2).size()) == counts.n_classes);
        // total distinct moments: brute-force enumeration of degree-2 monomials
        // in the 8 diagonalized operators
        CHECK(counts.n_b_total == brute_force_monomials(8, 2));
        CHECK(counts.n_b_total == 36);
        CHECK(counts.n_b_expected == counts.n_b_total);
    }
    SUBCASE("two modes at order 2") {
        const SpectrumPartition p = make_partition(
            {{Complex(0, -1), 1}, {Complex(0, -2), 1}, {Complex(0, -3), 1}, {Complex(0, -4), 1}});
        CHECK(moment_counts(p, 2).n_b_expected == 10);  // C(5, 2)
    }
}

TEST_CASE("multinomial and Vandermonde identities across partition shapes") {
    for (int count = 1; count <= 8; ++count) {
        std::vector<PartitionCluster> clusters;
        for (int j = 0; j < count; ++j)
            clusters.push_back({Complex(0, -0.1 * (j + 1)), 1 + (j % 3)});
        const SpectrumPartition p = make_partition(std::move(clusters));
        for (int k = 1; k <= 4; ++k) {
            long long dd_sum = 0;
            long long nb_sum = 0;
            for (const auto& c : moment_classes(p, k)) {
                dd_sum += c.d_d;
                nb_sum += c.n_b;
            }
            long long pw = 1;
            for (int q = 0; q < k; ++q) pw *= count;
            CHECK(dd_sum == pw);                                       // sum of multinomials
            CHECK(nb_sum == binomial(p.total_dim + k - 1, k));         // Vandermonde
            CHECK(static_cast<long long>(moment_classes(p, k).size()) ==
                  binomial(count + k - 1, k));
        }
    }
}

TEST_CASE("single dominant cluster reaches n^k exceptional degeneracy") {
    for (int n = 1; n <= 6; ++n) {
        for (int k = 1; k <= 3; ++k) {
            const SpectrumPartition p = make_partition(
                {{Complex(0, -1), n}, {Complex(0, -2), 1}, {Complex(0, -3), 1}});
            long long best = 0;
            for (const auto& c : moment_classes(p, k)) best = std::max(best, c.d_e);
            long long pw = 1;
            for (int q = 0; q < k; ++q) pw *= n;
            CHECK(best == pw);
        }
    }
}

TEST_CASE("generated table for the ring") {
    SUBCASE("first-order rows at the common rate") {
        const MomentClassTable table = generate_table(ring_on_locus(), 1);
        REQUIRE(table.rows.size() == 6);
        const MomentTableRow& b5 = row_for(table, "<B5>");
        CHECK(b5.ed_combined == 2);
        CHECK(b5.dd_combined == 1);
        CHECK(b5.ed_genuine == 2);
        CHECK(b5.dd_combined_total == 2);  // <B5> and <B6> share the eigenfrequency
        CHECK(b5.dd_genuine_total == 2);
        CHECK(std::abs(b5.cls.lambda - Complex(0, -0.25)) < 1e-7);
    }
    SUBCASE("second-order rows reproduce the tabulated degeneracies") {
        const MomentClassTable table = generate_table(ring_on_locus(), 2);
        REQUIRE(table.rows.size() == 21);

        const MomentTableRow& mixed = row_for(table, "<B5 B6>");
        CHECK(mixed.ed_combined == 4);
        CHECK(mixed.dd_combined == 2);
        CHECK(mixed.ed_genuine == 4);
        CHECK(mixed.dd_genuine == 1);
        CHECK(mixed.dd_combined_total == 4);  // classes <B5 B6>, <B5^2>, <B6^2>
        CHECK(mixed.dd_genuine_total == 1);
        CHECK(mixed.monomials.size() == 4);
        for (long long o : mixed.orderings) CHECK(o == 2);  // all four are distinct pairs

        const MomentTableRow& square = row_for(table, "<B5^2>");
        CHECK(square.ed_combined == 4);
        CHECK(square.ed_genuine == 3);
        CHECK(square.dd_genuine_total == 2);  // <B5^2> and <B6^2>
        REQUIRE(square.monomials.size() == 3);
        // b^2 and b†^2 admit one ordering, the mixed product two
        std::multiset<long long> orderings(square.orderings.begin(), square.orderings.end());
        CHECK(orderings == std::multiset<long long>{1, 1, 2});
    }
    SUBCASE("tetrahedron splits the big clusters in their real parts") {
        // on the same locus the tetrahedral pair clusters sit at -i gamma+ ∓ zeta,
        // so the mixed second-order class no longer shares its eigenfrequency
        // with the squared ones and the per-frequency totals shrink
        SystemSpec tetra;
        tetra.topology = Topology::Tetrahedral4;
        tetra.n = 4;
        tetra.coupling = CouplingParams(1.25, 0.75);
        tetra.gamma = {4.5, 0, -3.5, 0};
        tetra = apply_constraint(tetra, "equal-12-34");
        const MomentClassTable table = generate_table(tetra, 2);
        const MomentTableRow& mixed = row_for(table, "<B5 B6>");
        CHECK(mixed.ed_combined == 4);
        CHECK(mixed.dd_combined == 2);
        CHECK(mixed.dd_combined_total == 2);  // only the mixed class at this frequency
        CHECK(std::abs(mixed.cls.lambda.real()) < 1e-7);
        const MomentTableRow& square = row_for(table, "<B5^2>");
        CHECK(square.dd_combined_total == 1);
        CHECK(std::abs(square.cls.lambda.real() + 2.0) < 1e-7);  // -2 zeta
        CHECK(square.ed_genuine == 3);
        CHECK(square.dd_genuine_total == 1);
    }
    SUBCASE("synthetic QHP with n-th order ED: combined n^2, genuine n(n+1)/2") {
        for (int n = 2; n <= 6; ++n) {
            const SpectrumPartition p =
                make_partition({{Complex(0, -0.5), n}, {Complex(0, -0.5), n}});
            const MomentClassTable table = generate_table(p, 2);
            const MomentTableRow& mixed = row_for(table, "<B1 B2>");
            CHECK(mixed.ed_combined == n * n);
            CHECK(mixed.dd_combined == 2);
            CHECK(mixed.ed_genuine == n * n);
            const MomentTableRow& square = row_for(table, "<B1^2>");
            CHECK(square.ed_combined == n * n);
            CHECK(square.ed_genuine == n * (n + 1) / 2);
        }
    }
}

TEST_CASE("partition rejects odd dimensions and bad clusters") {
    JordanReport rep;
    rep.dim = 3;
    CHECK_THROWS_AS(partition_spectrum(rep), std::invalid_argument);
    CHECK_THROWS_AS(make_partition({{Complex(0), 0}}), std::invalid_argument);
    const SpectrumPartition p = make_partition({{Complex(0), 2}});
    CHECK_THROWS_AS(moment_classes(p, 0), std::invalid_argument);
}
