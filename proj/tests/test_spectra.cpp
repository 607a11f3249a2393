#include "eigenpoint/spectra.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <functional>
#include <random>

using namespace eigenpoint;

namespace {

SystemSpec make_spec(Topology t, int n, double eps, double kap, std::vector<double> g,
                     std::optional<ConcatSpec> concat = std::nullopt) {
    SystemSpec s;
    s.topology = t;
    s.n = n;
    s.coupling = CouplingParams(eps, kap);
    s.gamma = std::move(g);
    s.concat = std::move(concat);
    return s;
}

SystemSpec uni(int l, int r, double eps, double kap, std::vector<double> g) {
    return make_spec(Topology::UniConcat, l + r, eps, kap, std::move(g),
                     ConcatSpec{l, r, {}, CouplingKind::Xi});
}

// greedy matching distance between two eigenvalue multisets
double spectral_distance(std::vector<Complex> a, std::vector<Complex> b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (const Complex& va : a) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < b.size(); ++j)
            if (std::abs(va - b[j]) < std::abs(va - b[best])) best = j;
        worst = std::max(worst, std::abs(va - b[best]));
        b.erase(b.begin() + static_cast<long>(best));
    }
    return worst;
}

std::vector<Complex> numeric_values(const Matrix& m) {
    Eigen::ComplexEigenSolver<Matrix> solver(m, false);
    REQUIRE(solver.info() == Eigen::Success);
    std::vector<Complex> out(m.rows());
    for (int i = 0; i < m.rows(); ++i) out[i] = solver.eigenvalues()(i);
    return out;
}

}  // namespace

TEST_CASE("coupling-block eigensystem") {
    SUBCASE("kappa = 0 keeps the block diagonal") {
        const XiEigensystem xi = xi_eigensystem(CouplingParams(1.0, 0.0));
        CHECK(xi.values[0] == Complex(-1.0));
        CHECK(xi.values[1] == Complex(1.0));
        const Eigen::Matrix2cd b = CouplingParams(1.0, 0.0).xi();
        for (int k = 0; k < 2; ++k)
            CHECK((b * xi.vectors[k] - xi.values[k] * xi.vectors[k]).norm() == 0.0);
    }
    SUBCASE("generic eigenpairs") {
        const XiEigensystem xi = xi_eigensystem(CouplingParams(5.0, 3.0));
        CHECK(xi.values[0] == Complex(-4.0));
        CHECK(xi.values[1] == Complex(4.0));
        CHECK(std::abs(xi.vectors[0](0) - Complex(-1.0 / 3.0)) < 1e-15);
        CHECK(xi.vectors[0](1) == Complex(1.0));
    }
    SUBCASE("kappa = epsilon is itself an exceptional structure") {
        const XiEigensystem xi = xi_eigensystem(CouplingParams(1.0, 1.0));
        CHECK(xi.values[0] == Complex(0.0));
        CHECK(xi.values[1] == Complex(0.0));
        CHECK((xi.vectors[0] - xi.vectors[1]).norm() == 0.0);
        CHECK(std::abs(xi.vectors[0](0) + 1.0) < 1e-15);  // direction [-1, 1]
    }
    SUBCASE("kappa > epsilon takes the imaginary branch") {
        const Complex z = CouplingParams(1.0, 2.0).zeta();
        CHECK(z.real() == 0.0);
        CHECK(z.imag() == doctest::Approx(std::sqrt(3.0)));
    }
}

TEST_CASE("analytic eigenvalues agree with the numeric eigensolver across random draws") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> rate(-1.0, 1.0);
    std::uniform_real_distribution<double> eps_d(0.2, 2.0);
    std::uniform_real_distribution<double> ratio(0.0, 1.3);

    auto draw_rates = [&](int n) {
        std::vector<double> g(n);
        for (auto& v : g) v = rate(rng);
        return g;
    };
    struct Case {
        const char* constraint;  // nullptr = none required
        std::function<SystemSpec(double, double, std::vector<double>)> build;
        int n;
        // concatenated systems are defective under their constraints, and a
        // generic eigensolver only resolves defective eigenvalues to about
        // sqrt(machine epsilon)
        double tol{1e-9};
    };
    const std::vector<Case> cases = {
        {"equal-13-24",
         [](double e, double k, std::vector<double> g) {
             return make_spec(Topology::Circular4, 4, e, k, std::move(g));
         },
         4},
        {"equal-12-34",
         [](double e, double k, std::vector<double> g) {
             return make_spec(Topology::Tetrahedral4, 4, e, k, std::move(g));
         },
         4},
        {nullptr,
         [](double e, double k, std::vector<double> g) {
             return make_spec(Topology::Chain, 2, e, k, std::move(g));
         },
         2},
        {"mid-mean",
         [](double e, double k, std::vector<double> g) {
             return make_spec(Topology::Chain, 3, e, k, std::move(g));
         },
         3},
        {nullptr, [](double e, double k, std::vector<double> g) { return uni(1, 1, e, k, std::move(g)); }, 2},
        {"head-mean", [](double e, double k, std::vector<double> g) { return uni(1, 2, e, k, std::move(g)); }, 3},
        {"equal-13-24", [](double e, double k, std::vector<double> g) { return uni(2, 2, e, k, std::move(g)); }, 4, 1e-6},
        {"sum-match", [](double e, double k, std::vector<double> g) { return uni(2, 3, e, k, std::move(g)); }, 5, 1e-6},
        {"ends-equal", [](double e, double k, std::vector<double> g) { return uni(3, 3, e, k, std::move(g)); }, 6, 1e-6},
    };

    for (const Case& c : cases) {
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const double e = eps_d(rng);
            const double k = ratio(rng) * e;  // sometimes kappa > epsilon
            SystemSpec spec = c.build(e, k, draw_rates(c.n));
            if (c.constraint) spec = apply_constraint(spec, c.constraint);
            const BlockEigenSystem block = analytic_eigensystem(spec);
            const FullSpectrum lifted = lift_full_spectrum(block);
            const DynamicalMatrix m = build_system(spec);
            worst = std::max(worst, spectral_distance(lifted.values, numeric_values(m.m)));
        }
        CHECK(worst < c.tol);
    }
}

TEST_CASE("lifted eigenpairs satisfy the full eigenvalue equation") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> rate(-1.0, 1.0);
    const std::vector<SystemSpec> specs = {
        apply_constraint(make_spec(Topology::Circular4, 4, 1.1, 0.4,
                                   {rate(rng), rate(rng), 0, 0}),
                         "equal-13-24"),
        apply_constraint(make_spec(Topology::Tetrahedral4, 4, 0.9, 0.2,
                                   {rate(rng), 0, rate(rng), 0}),
                         "equal-12-34"),
        make_spec(Topology::Chain, 2, 1.0, 0.3, {0.7, -0.2}),
        apply_constraint(make_spec(Topology::Chain, 3, 1.0, 0.5, {0.6, 0, -0.1}), "mid-mean"),
        uni(1, 1, 1.0, 0.6, {0.4, 0.8}),
        apply_constraint(uni(1, 2, 1.2, 0.5, {0, 0.9, -0.3}), "head-mean"),
    };
    for (const SystemSpec& spec : specs) {
        const FullSpectrum lifted = lift_full_spectrum(analytic_eigensystem(spec));
        const Matrix m = build_system(spec).m;
        REQUIRE(!lifted.vectors.empty());
        for (std::size_t j = 0; j < lifted.values.size(); ++j) {
            const CVector& y = lifted.vectors[j];
            CHECK((m * y - lifted.values[j] * y).norm() <= 1e-10 * m.norm() * y.norm());
        }
    }
}

TEST_CASE("lifted eigenvalues sum to the trace") {
    const SystemSpec spec = apply_constraint(
        make_spec(Topology::Circular4, 4, 1.0, 0.25, {0.8, -0.3, 0, 0}), "equal-13-24");
    const FullSpectrum lifted = lift_full_spectrum(analytic_eigensystem(spec));
    Complex sum = 0.0;
    for (const Complex& v : lifted.values) sum += v;
    const Complex tr = build_system(spec).m.trace();
    CHECK(std::abs(sum - tr) <= 1e-10 * std::max(1.0, std::abs(tr)));
}

TEST_CASE("reference closed-form spectra") {
    SUBCASE("one-way two-mode eigenvalues are the half rates") {
        const BlockEigenSystem block = analytic_eigensystem(uni(1, 1, 1.0, 0.3, {0.4, 0.8}));
        CHECK(std::abs(block.values[0][0] - Complex(0, -0.2)) < 1e-15);
        CHECK(std::abs(block.values[0][1] - Complex(0, -0.4)) < 1e-15);
    }
    SUBCASE("two-mode chain at beta = 0 has equal eigenvalues") {
        // dyadic parameters make beta-squared vanish exactly
        const SystemSpec spec = make_spec(Topology::Chain, 2, 1.25, 0.75, {2.5, -1.5});
        const BlockEigenSystem block = analytic_eigensystem(spec);
        CHECK(block.beta == Complex(0.0));
        CHECK(block.values[0][0] == block.values[0][1]);
        CHECK(block.values[0][0] == Complex(0, -0.25));
    }
    SUBCASE("undamped circular ring splits into 0, 0, -2xi, +2xi per branch") {
        const SystemSpec spec = make_spec(Topology::Circular4, 4, 1.0, 0.0, {0, 0, 0, 0});
        const BlockEigenSystem block = analytic_eigensystem(spec);
        for (int b = 0; b < 2; ++b) {
            const double xi = b == 0 ? -1.0 : 1.0;
            CHECK(spectral_distance(block.values[b],
                                    {Complex(0), Complex(0), Complex(-2 * xi), Complex(2 * xi)}) <
                  1e-12);
        }
    }
    SUBCASE("circular ring on its locus lifts to the tabulated multiset") {
        // gamma- = 2 zeta with zeta = 1 exactly
        const SystemSpec spec = apply_constraint(
            make_spec(Topology::Circular4, 4, 1.25, 0.75, {4.5, -3.5, 0, 0}), "equal-13-24");
        const BlockEigenSystem block = analytic_eigensystem(spec);
        CHECK(block.beta == Complex(0.0));
        const FullSpectrum lifted = lift_full_spectrum(block);
        const double gp = (4.5 - 3.5) / 4.0;
        std::vector<Complex> expect = {Complex(0, -2.25), Complex(0, -2.25), Complex(0, 1.75),
                                       Complex(0, 1.75),  Complex(0, -gp),  Complex(0, -gp),
                                       Complex(0, -gp),   Complex(0, -gp)};
        CHECK(spectral_distance(lifted.values, expect) < 1e-12);
    }
}

TEST_CASE("on-locus eigenvector coalescence and off-locus separation") {
    SUBCASE("coalescence at exact loci") {
        struct OnLocus {
            SystemSpec spec;
            int lo, hi;  // positions of the beta pair in the reduced list
        };
        const std::vector<OnLocus> cases = {
            {make_spec(Topology::Chain, 2, 1.25, 0.75, {2.5, -1.5}), 0, 1},
            {apply_constraint(make_spec(Topology::Circular4, 4, 1.25, 0.75, {4.5, -3.5, 0, 0}),
                              "equal-13-24"),
             2, 3},
            {apply_constraint(uni(1, 2, 1.25, 0.75, {0, 2.5, -1.5}), "head-mean"), 1, 2},
            {apply_constraint(make_spec(Topology::Chain, 3, 0.75, 0.25, {2.5, 0, -1.5}),
                              "mid-mean"),
             1, 2},
        };
        for (const OnLocus& c : cases) {
            const BlockEigenSystem block = analytic_eigensystem(c.spec);
            CHECK(std::abs(block.beta) == 0.0);
            for (int b = 0; b < 2; ++b) {
                CHECK(std::abs(block.values[b][c.lo] - block.values[b][c.hi]) <= 1e-10);
                if (block.vectors[b].empty()) continue;
                CVector u = block.vectors[b][c.lo].normalized();
                CVector v = block.vectors[b][c.hi].normalized();
                CHECK(std::abs(std::abs(u.dot(v)) - 1.0) < 1e-12);
            }
        }
    }
    SUBCASE("separation away from the locus") {
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            const double eps = 0.5 + u01(rng);
            const double kap = u01(rng) * eps;
            const double gp = u01(rng) - 0.5;
            const double gm = 2.0 * (u01(rng) - 0.5);
            SystemSpec spec = make_spec(Topology::Chain, 2, eps, kap,
                                        {2 * (gp + gm), 2 * (gp - gm)});
            if (std::abs(locus_residual(spec, "chain2").value) < 0.1) continue;
            const BlockEigenSystem block = analytic_eigensystem(spec);
            CHECK(std::abs(block.values[0][0] - block.values[0][1]) >= 1e-3 * eps);
        }
    }
}

TEST_CASE("locus residuals") {
    SUBCASE("ring locus vanishes at kappa = 0, gamma- = 2 epsilon") {
        const SystemSpec s = apply_constraint(
            make_spec(Topology::Circular4, 4, 1.0, 0.0, {4.0, -4.0, 0, 0}), "equal-13-24");
        CHECK(locus_residual(s, "ring4").value == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("two-mode locus vanishes at kappa = epsilon, gamma- = 0") {
        const SystemSpec s = make_spec(Topology::Chain, 2, 1.0, 1.0, {0.3, 0.3});
        CHECK(locus_residual(s, "chain2").value == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("three-mode locus at kappa = 0, gamma- = epsilon") {
        const SystemSpec s = apply_constraint(
            make_spec(Topology::Chain, 3, 1.0, 0.0, {2.0, 0, -2.0}), "mid-mean");
        CHECK(locus_residual(s, "chain3").value == doctest::Approx(-0.5));
    }
    SUBCASE("joint 2+3 condition") {
        SystemSpec s = uni(2, 3, 1.0, 0.5, {0.9, 0.1, 0.7, 0, 0.3});
        s = apply_constraint(apply_constraint(s, "sum-match"), "diff-match");
        CHECK(locus_residual(s, "diff-match").value == doctest::Approx(0.0).epsilon(1e-14));
        // the right chain's own locus uses the bar aggregate
        const double gmb = (s.gamma[2] - s.gamma[4]) / 4.0;
        CHECK(locus_residual(s, "chain3-bar").value ==
              doctest::Approx(0.25 + gmb * gmb / 2.0 - 1.0));
    }
    SUBCASE("unknown or mismatched ids throw") {
        const SystemSpec s = make_spec(Topology::Chain, 2, 1.0, 0.5, {0.1, 0.2});
        CHECK_THROWS_AS(locus_residual(s, "ring4"), std::invalid_argument);
        CHECK_THROWS_AS(locus_residual(s, "nope"), std::invalid_argument);
    }
}

TEST_CASE("closed-form catalog misses fall back by throwing") {
    // unconstrained ring rates
    CHECK_THROWS_AS(analytic_eigensystem(
                        make_spec(Topology::Circular4, 4, 1.0, 0.2, {0.1, 0.2, 0.3, 0.4})),
                    NoClosedForm);
    // Hamiltonian-generated one-way coupling has no shared-block reduction
    SystemSpec h = uni(1, 1, 1.0, 0.2, {0.4, 0.4});
    h.concat->kind = CouplingKind::Hamiltonian1;
    CHECK_THROWS_AS(analytic_eigensystem(h), NoClosedForm);
    // chain longer than the catalog
    CHECK_THROWS_AS(analytic_eigensystem(make_spec(Topology::Chain, 4, 1.0, 0.2, {0, 0, 0, 0})),
                    NoClosedForm);
}

TEST_CASE("lift rejects mismatched branch counts") {
    BlockEigenSystem block;
    block.xi = xi_eigensystem(CouplingParams(1.0, 0.5));
    block.values[0] = {Complex(0, -0.1), Complex(0, -0.2)};
    block.values[1] = {Complex(0, -0.1)};
    CHECK_THROWS_AS(lift_full_spectrum(block), std::invalid_argument);
}

TEST_CASE("trivial lift keeps the branch eigenvalues") {
    BlockEigenSystem block;
    block.xi = xi_eigensystem(CouplingParams(1.0, 0.5));
    block.values[0] = {Complex(0, -0.1)};
    block.values[1] = {Complex(0, -0.1)};
    CVector y(1);
    y << 1.0;
    block.vectors[0] = {y};
    block.vectors[1] = {y};
    const FullSpectrum lifted = lift_full_spectrum(block);
    CHECK(lifted.values.size() == 2);
    CHECK(lifted.values[0] == Complex(0, -0.1));
    CHECK(lifted.values[1] == Complex(0, -0.1));
    CHECK(lifted.vectors[0](0) == block.xi.vectors[0](0));
}
