#include "eigenpoint/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <limits>

namespace eigenpoint {

namespace {

double require_positive_gamma(const UniParams& p) {
    if (p.gamma <= 0.0) throw std::invalid_argument("two-mode model: gamma must be positive");
    return p.gamma;
}

// sinh(γt)/γ, stable at small γ
double sinhc(double gamma, double t) {
    if (std::abs(gamma * t) < 1e-8) {
        const double x = gamma * t;
        return t * (1.0 + x * x / 6.0);
    }
    return std::sinh(gamma * t) / gamma;
}

// fixed 10-point Gauss-Legendre rule on [-1, 1]
constexpr std::array<double, 5> kGlNodes = {0.1488743389816312, 0.4333953941292472,
                                            0.6794095682990244, 0.8650633666889845,
                                            0.9739065285171717};
constexpr std::array<double, 5> kGlWeights = {0.2955242247147529, 0.2692667193099963,
                                              0.2190863625159820, 0.1494513491505806,
                                              0.0666713443086881};

template <typename F>
Matrix integrate_matrix(F&& f, double a, double b, double rel_tol) {
    auto with_panels = [&](int panels) {
        const double h = (b - a) / panels;
        Matrix acc;
        bool first = true;
        for (int p = 0; p < panels; ++p) {
            const double mid = a + (p + 0.5) * h;
            for (int k = 0; k < 5; ++k) {
                for (double sign : {-1.0, 1.0}) {
                    const Matrix val = f(mid + sign * 0.5 * h * kGlNodes[k]);
                    if (first) {
                        acc = Matrix::Zero(val.rows(), val.cols());
                        first = false;
                    }
                    acc += (0.5 * h * kGlWeights[k]) * val;
                }
            }
        }
        return acc;
    };
    Matrix coarse = with_panels(8);
    for (int panels = 16; panels <= 256; panels *= 2) {
        Matrix fine = with_panels(panels);
        const double scale = std::max(fine.norm(), 1e-30);
        if ((fine - coarse).norm() <= rel_tol * scale) return fine;
        coarse = fine;
    }
    throw QuadratureError("matrix quadrature did not converge; step too coarse");
}

}  // namespace

Matrix matrix_exp(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("matrix_exp: square matrix required");
    const int n = static_cast<int>(a.rows());
    const Matrix id = Matrix::Identity(n, n);

    // order-13 Padé coefficients
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const double theta13 = 5.371920351148152;

    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    Matrix as = a;
    if (norm1 > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
        as /= std::pow(2.0, squarings);
    }

    const Matrix a2 = as * as;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a2 * a4;
    const Matrix u =
        as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
              b[1] * id);
    const Matrix v =
        a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

    Matrix r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) r = r * r;
    return r;
}

Matrix propagator(const Matrix& m, double t) {
    if (t < 0.0) throw std::invalid_argument("propagator: t must be nonnegative");
    return matrix_exp(Complex(0.0, -t) * m);
}

UVBlocks extract_uv(const Matrix& p) {
    const int n = static_cast<int>(p.rows()) / 2;
    UVBlocks out;
    out.u = Matrix(n, n);
    out.v = Matrix(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            out.u(j, k) = p(2 * j, 2 * k);
            out.v(j, k) = p(2 * j, 2 * k + 1);
        }
    return out;
}

SystemSpec uni_spec(const UniParams& p) {
    require_positive_gamma(p);
    SystemSpec spec;
    spec.topology = Topology::UniConcat;
    spec.n = 2;
    spec.coupling = CouplingParams(p.epsilon, p.kappa);
    spec.gamma = {2.0 * p.gamma, -2.0 * p.gamma};
    spec.constraint = "damp-amp";
    spec.concat = ConcatSpec{1, 1, {{1, 1}}, CouplingKind::Xi};
    return spec;
}

UVBlocks uni_uv(const UniParams& p, double t) {
    require_positive_gamma(p);
    const TimeFunctions tf{p.gamma};
    const double sh = sinhc(p.gamma, t);
    UVBlocks out;
    out.u = Matrix::Zero(2, 2);
    out.v = Matrix::Zero(2, 2);
    out.u(0, 0) = tf.mu(t);
    out.u(1, 1) = 1.0 / tf.mu(t);
    out.u(1, 0) = -kI * p.epsilon * sh;
    out.v(1, 0) = -kI * p.kappa * sh;
    return out;
}

Matrix noise_correlation(const std::vector<double>& gamma) {
    const int n = static_cast<int>(gamma.size());
    Matrix d = Matrix::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        if (gamma[j] >= 0.0)
            d(2 * j, 2 * j) = gamma[j];
        else
            d(2 * j + 1, 2 * j + 1) = -gamma[j];
    }
    return d;
}

Matrix noise_commutator(const std::vector<double>& gamma) {
    const int n = static_cast<int>(gamma.size());
    Matrix d = Matrix::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        d(2 * j, 2 * j) = gamma[j];
        d(2 * j + 1, 2 * j + 1) = -gamma[j];
    }
    return d;
}

Matrix force_correlations(const UniParams& p, double t) {
    const double g = require_positive_gamma(p);
    if (t < 0.0) throw std::invalid_argument("force_correlations: t must be nonnegative");
    const TimeFunctions tf{g};
    const double mu = tf.mu(t);
    const double eps = p.epsilon;
    const double kap = p.kappa;
    const double w = (tf.s(t) - 2.0 * g * t) / (2.0 * g * g);

    Matrix f = Matrix::Zero(4, 4);
    f(0, 0) = 1.0 - mu * mu;
    const Complex f12 = kI * tf.sigma(t) / (2.0 * g);
    f(0, 2) = f12 * eps;
    f(0, 3) = -f12 * kap;
    f(2, 0) = std::conj(f(0, 2));
    f(3, 0) = std::conj(f(0, 3));
    f(2, 2) = w * eps * eps;
    f(2, 3) = -w * eps * kap;
    f(3, 2) = -w * eps * kap;
    f(3, 3) = w * kap * kap + (1.0 / (mu * mu) - 1.0);
    return f;
}

Matrix force_correlations_quadrature(const UniParams& p, double t, double rel_tol) {
    require_positive_gamma(p);
    const SystemSpec spec = uni_spec(p);
    const Matrix m = build_system(spec).m;
    const Matrix noise = noise_correlation(spec.gamma);
    if (t == 0.0) return Matrix::Zero(4, 4);
    return integrate_matrix(
        [&](double tau) -> Matrix {
            const Matrix pr = propagator(m, tau);
            return pr * noise * pr.adjoint();
        },
        0.0, t, rel_tol);
}

Matrix commutator_matrix(const Matrix& m, const std::vector<double>& gamma, double t,
                         double rel_tol) {
    const int dim = static_cast<int>(m.rows());
    if (dim != 2 * static_cast<int>(gamma.size()))
        throw std::invalid_argument("commutator_matrix: rate list does not match dimension");
    Matrix j = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) j(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    const Matrix pt = propagator(m, t);
    Matrix acc = pt * j * pt.adjoint();
    if (t > 0.0) {
        const Matrix nc = noise_commutator(gamma);
        acc += integrate_matrix(
            [&](double tau) -> Matrix {
                const Matrix pr = propagator(m, tau);
                return pr * nc * pr.adjoint();
            },
            0.0, t, rel_tol);
    }
    return acc;
}

CommutatorCheck commutator_check(const UniParams& p, double t, double margin) {
    const double g = require_positive_gamma(p);
    const TimeFunctions tf{g};
    CommutatorCheck out;
    out.comm22 =
        1.0 + (p.epsilon * p.epsilon - p.kappa * p.kappa) * tf.phi(t) / (2.0 * g * g);
    // exact value of ⟨[a₁(t), a₂†(t)]⟩: μU₂₁* + iεσ/(2γ) collapses to iεt
    out.comm12 = kI * p.epsilon * t;
    const double window = margin * std::min(1.0 / g, 1.0 / std::max(p.epsilon, 1e-300));
    out.valid = t <= window;
    return out;
}

ReservoirCheck reservoir_consistency(const UniParams& p, double t) {
    const double g = require_positive_gamma(p);
    const TimeFunctions tf{g};
    const double mu = tf.mu(t);
    const double l1 = tf.l1(t);
    const double l2 = tf.l2(t);
    const double eps = p.epsilon;
    const double kap = p.kappa;

    Matrix c = Matrix::Zero(4, 4);
    c(0, 0) = 2.0 * g;
    c(0, 2) = -kI * eps * l1;
    c(2, 0) = kI * eps * l1;
    c(2, 2) = -eps * eps * mu * mu * l2 / g;
    c(2, 3) = eps * kap * l1 * l2 / (2.0 * g);
    c(3, 2) = c(2, 3);
    c(3, 3) = 2.0 * g - kap * kap * l2 / g;

    ReservoirCheck out;
    out.correlation = c;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(c);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("reservoir_consistency: eigensolver failed");
    out.eigenvalues = solver.eigenvalues();
    out.physical = out.eigenvalues.minCoeff() >= -1e-12;
    return out;
}

GaussianTrajectory gaussian_evolution(const UniParams& p, const std::array<Complex, 2>& alpha0,
                                      const std::vector<double>& times, double margin) {
    const double g = require_positive_gamma(p);
    GaussianTrajectory traj;
    traj.params = p;
    traj.samples.reserve(times.size());

    for (double t : times) {
        if (t < 0.0) throw std::invalid_argument("gaussian_evolution: times must be nonnegative");
        const UVBlocks uv = uni_uv(p, t);
        const Matrix f = force_correlations(p, t);

        GaussianSample s;
        s.t = t;
        s.alpha1 = uv.u(0, 0) * alpha0[0] + uv.u(0, 1) * alpha0[1] + uv.v(0, 0) * std::conj(alpha0[0]) +
                   uv.v(0, 1) * std::conj(alpha0[1]);
        s.alpha2 = uv.u(1, 0) * alpha0[0] + uv.u(1, 1) * alpha0[1] + uv.v(1, 0) * std::conj(alpha0[0]) +
                   uv.v(1, 1) * std::conj(alpha0[1]);

        // second moments of the fluctuations: initial coherent states contribute
        // only through ⟨δa δa†⟩ = 1, the rest comes from the accumulated forces
        const Complex u21 = uv.u(1, 0);
        const Complex v21 = uv.v(1, 0);
        s.b2 = std::norm(v21) + f(3, 3).real();
        s.c2 = u21 * v21 + f(2, 3);
        s.d = uv.u(0, 0) * v21 + f(0, 3);
        const double b1 = f(1, 1).real();
        const Complex c1 = f(0, 1);
        s.tau1 = std::max(0.0, std::abs(c1) - b1);
        s.tau2 = std::max(0.0, std::abs(s.c2) - s.b2);

        // symplectic spectrum of the partially transposed covariance matrix
        Eigen::Matrix2d sigma2;
        sigma2 << 1.0 + 2.0 * s.b2 + 2.0 * s.c2.real(), 2.0 * s.c2.imag(),
                  2.0 * s.c2.imag(), 1.0 + 2.0 * s.b2 - 2.0 * s.c2.real();
        Eigen::Matrix2d sigma12;
        sigma12 << 0.0, -2.0 * s.d.imag(), 2.0 * s.d.imag(), 0.0;
        Eigen::Matrix4d sigma_pt;
        sigma_pt << Eigen::Matrix2d::Identity(), sigma12, sigma12.transpose(), sigma2;

        const double delta_inv = 1.0 + sigma2.determinant() + 2.0 * sigma12.determinant();
        const double big_delta = sigma_pt.determinant();
        const double disc = std::max(0.0, delta_inv * delta_inv - 4.0 * big_delta);
        const double nu2 = std::max(0.0, 0.5 * (delta_inv - std::sqrt(disc)));
        s.nu_minus = std::sqrt(nu2);
        s.en = s.nu_minus > 0.0 ? std::max(0.0, -std::log(s.nu_minus)) : 0.0;

        const double ratio = p.kappa / g;
        const double arg = 1.0 + 2.0 * g * t * (1.0 - std::sqrt(1.0 + ratio * ratio));
        s.en_short = arg > 0.0 ? std::max(0.0, -std::log(arg)) : std::numeric_limits<double>::infinity();

        const CommutatorCheck cc = commutator_check(p, t, margin);
        s.comm22 = cc.comm22;
        s.comm12 = cc.comm12;
        s.valid = cc.valid;
        traj.samples.push_back(s);
    }
    return traj;
}

}  // namespace eigenpoint
