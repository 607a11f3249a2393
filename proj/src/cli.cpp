#include "eigenpoint/cli.hpp"

#include "eigenpoint/io.hpp"
#include "eigenpoint/spectra.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

namespace eigenpoint::cli {

namespace {

using nlohmann::json;

// ---------------------------------- logging ----------------------------------

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("EIGENPOINT_LOG");
        if (!env) return 1;
        const std::string v(env);
        if (v == "error") return 0;
        if (v == "warn") return 1;
        if (v == "info") return 2;
        if (v == "debug") return 3;
        return 1;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[eigenpoint] " << msg << "\n";
}

// ---------------------------------- options ----------------------------------

struct CommonOpts {
    std::string config_path;
    std::string out{"-"};
    std::string format{"csv"};
    int jobs{1};
    double cluster_tol{-1.0};
    double rank_tol{1e-9};
    double delta_min{1e-10};
    double delta_max{1e-4};
    int delta_steps{25};

    // flag overrides applied on top of the config file
    std::optional<std::string> topology;
    std::optional<int> n;
    std::optional<double> epsilon;
    std::optional<double> kappa;
    std::vector<double> rates;
    std::optional<std::string> constraint;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON system configuration");
    cmd->add_option("--out", o.out, "output path ('-' for stdout)");
    cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--jobs", o.jobs, "worker threads for scans")->check(CLI::PositiveNumber);
    cmd->add_option("--cluster-tol", o.cluster_tol, "eigenvalue clustering tolerance");
    cmd->add_option("--rank-tol", o.rank_tol, "rank decision tolerance");
    cmd->add_option("--delta-min", o.delta_min, "perturbation grid lower end");
    cmd->add_option("--delta-max", o.delta_max, "perturbation grid upper end");
    cmd->add_option("--delta-steps", o.delta_steps, "perturbation grid points");
    cmd->add_option("--topology", o.topology, "override: topology name");
    cmd->add_option("--n", o.n, "override: mode count");
    cmd->add_option("--epsilon", o.epsilon, "override: linear coupling strength");
    cmd->add_option("--kappa", o.kappa, "override: nonlinear coupling strength");
    cmd->add_option("--rates", o.rates, "override: per-mode rates")->delimiter(',');
    cmd->add_option("--constraint", o.constraint, "override: named rate constraint");
}

// flags override file values; the resolved spec is echoed into every output
SystemSpec resolve_spec(const CommonOpts& o, const SystemSpec& fallback) {
    SystemSpec spec = fallback;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw std::invalid_argument("cannot read config: " + o.config_path);
        json j;
        in >> j;
        spec = spec_from_json(j);
    }
    if (o.topology) spec.topology = topology_from_name(*o.topology);
    if (o.n) {
        spec.n = *o.n;
        spec.gamma.resize(*o.n, 0.0);
        if (spec.topology == Topology::UniConcat && !spec.concat)
            spec.concat = ConcatSpec{1, spec.n - 1, {}, CouplingKind::Xi};
    }
    if (o.epsilon || o.kappa)
        spec.coupling = CouplingParams(o.epsilon.value_or(spec.coupling.epsilon),
                                       o.kappa.value_or(spec.coupling.kappa));
    if (!o.rates.empty()) spec.gamma = o.rates;
    if (o.constraint) spec.constraint = *o.constraint;
    validate_spec(spec);
    if (spec.constraint) spec = apply_constraint(spec, *spec.constraint);
    return spec;
}

Tolerances tolerances(const CommonOpts& o) { return {o.cluster_tol, o.rank_tol}; }

void write_output(const CommonOpts& o, const std::string& meta_json, const std::string& csv_body,
                  json json_body) {
    std::string payload;
    if (o.format == "csv") {
        payload = "# " + meta_json + "\n" + csv_body;
    } else {
        json_body["config"] = json::parse(meta_json);
        payload = json_body.dump(2) + "\n";
    }
    if (o.out == "-") {
        std::cout << payload;
    } else {
        std::ofstream out(o.out, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot write output: " + o.out);
        out << payload;
        log_info("wrote " + o.out);
    }
}

// --------------------------------- scan-locus ---------------------------------

struct ScanJob {
    SystemSpec spec;      // template; rates rebuilt per grid cell
    std::string locus;
    double lo{0.0};
    double hi{1.2};
    int steps{200};
    double gamma_plus{0.0};
    double gap_tol{-1.0};  // < 0 → 2·sqrt(m)·ε·sqrt(grid step)
};

std::string default_locus(const SystemSpec& spec) {
    const RateAggregates agg = rate_aggregates(spec);
    switch (agg.beta_coeff) {
        case 4: return "ring4";
        case 1: return "chain2";
        case 2: return "chain3";
        default: throw std::invalid_argument("no locus family for this topology");
    }
}

// rates realizing the requested (γ₊, γ₋) under the family's constraint
SystemSpec spec_at(const SystemSpec& tmpl, double u, double v, double gamma_plus) {
    SystemSpec s = tmpl;
    const double eps = s.coupling.epsilon;
    s.coupling = CouplingParams(eps, u * eps);
    const double gp = gamma_plus * eps;
    const double gm = v * eps;
    const double hi = 2.0 * (gp + gm);
    const double lo = 2.0 * (gp - gm);

    auto with = [&](const std::string& constraint, std::vector<double> g) {
        s.gamma = std::move(g);
        return apply_constraint(s, constraint);
    };
    switch (s.topology) {
        case Topology::Circular4: return with("equal-13-24", {hi, lo, 0, 0});
        case Topology::Tetrahedral4: return with("equal-12-34", {hi, 0, lo, 0});
        case Topology::Chain:
            if (s.n == 2) {
                s.gamma = {hi, lo};
                return s;
            }
            if (s.n == 3) return with("mid-mean", {hi, 0, lo});
            break;
        case Topology::UniConcat: {
            const ConcatSpec& c = *s.concat;
            if (c.left == 1 && c.right == 2) return with("head-mean", {0, hi, lo});
            if (c.left == 2 && c.right == 2) return with("equal-13-24", {hi, lo, 0, 0});
            if (c.left == 2 && c.right == 3) {
                const double gmb = gm * std::sqrt(2.0);
                s.gamma = {hi, lo, 2.0 * (gp + gmb), 2.0 * gp, 2.0 * (gp - gmb)};
                s.constraint = "sum-match";
                return s;
            }
            if (c.left == 3 && c.right == 3) return with("ends-equal", {hi, 0, lo, 0, 0, 0});
            break;
        }
    }
    throw std::invalid_argument("scan-locus: unsupported topology");
}

struct ScanRow {
    double u, v;
    Complex lam_minus, lam_plus;
    double gap{0.0};
    double residual{0.0};
    bool coalesced{false};
};

// indices of the primary ∓β eigenvalue pair in the cataloged reduced spectrum
std::pair<int, int> beta_pair_index(const SystemSpec& spec) {
    switch (spec.topology) {
        case Topology::Circular4:
        case Topology::Tetrahedral4: return {2, 3};
        case Topology::Chain: return spec.n == 2 ? std::pair{0, 1} : std::pair{1, 2};
        case Topology::UniConcat: {
            const ConcatSpec& c = *spec.concat;
            if (c.left == 1 && c.right == 2) return {1, 2};
            if (c.left == 2 && c.right == 2) return {0, 1};
            if (c.left == 2 && c.right == 3) return {3, 4};
            if (c.left == 3 && c.right == 3) return {2, 3};
            break;
        }
    }
    throw std::invalid_argument("scan-locus: unsupported topology");
}

ScanRow scan_cell(const ScanJob& job, double u, double v, double gap_tol) {
    ScanRow row;
    row.u = u;
    row.v = v;
    const SystemSpec cell = spec_at(job.spec, u, v, job.gamma_plus);
    row.residual = locus_residual_normalized(job.locus, u, v);

    const BlockEigenSystem analytic = analytic_eigensystem(cell);
    const DynamicalMatrix reduced = build_reduced(cell, analytic.xi.values[0]);

    Eigen::ComplexEigenSolver<Matrix> solver(reduced.m, false);
    if (solver.info() != Eigen::Success) throw Indeterminate("scan-locus: eigensolver failed");
    const auto& ev = solver.eigenvalues();

    // match numeric eigenvalues onto the cataloged order (greedy on the small
    // reduced spectra is stable enough away from exact coalescence)
    const std::vector<Complex>& ref = analytic.values[0];
    std::vector<int> taken(ev.size(), 0);
    std::vector<Complex> matched(ref.size());
    for (std::size_t r = 0; r < ref.size(); ++r) {
        int best = -1;
        double best_d = 0.0;
        for (int i = 0; i < ev.size(); ++i) {
            if (taken[i]) continue;
            const double d = std::abs(ev(i) - ref[r]);
            if (best < 0 || d < best_d) {
                best = i;
                best_d = d;
            }
        }
        taken[best] = 1;
        matched[r] = ev(best);
    }
    const auto [i, j] = beta_pair_index(cell);
    row.lam_minus = matched[i];
    row.lam_plus = matched[j];
    row.gap = std::abs(matched[i] - matched[j]);
    row.coalesced = row.gap < gap_tol;
    return row;
}

int run_scan(const ScanJob& job, const CommonOpts& opts, const std::string& meta) {
    const int steps = job.steps;
    if (steps < 2) throw std::invalid_argument("scan-locus: steps must be >= 2");
    const double h = (job.hi - job.lo) / (steps - 1);
    const RateAggregates agg = rate_aggregates(job.spec);
    const double gap_tol = job.gap_tol > 0.0
                               ? job.gap_tol
                               : 2.0 * std::sqrt(double(agg.beta_coeff)) *
                                     job.spec.coupling.epsilon * std::sqrt(h);

    std::vector<ScanRow> rows(static_cast<std::size_t>(steps) * steps);
    const int jobs = std::max(1, opts.jobs);
    std::vector<std::thread> workers;
    std::atomic<int> next_row{0};
    auto work = [&] {
        for (;;) {
            const int iv = next_row.fetch_add(1);
            if (iv >= steps) return;
            for (int iu = 0; iu < steps; ++iu) {
                const double u = job.lo + h * iu;
                const double v = job.lo + h * iv;
                rows[static_cast<std::size_t>(iv) * steps + iu] = scan_cell(job, u, v, gap_tol);
            }
        }
    };
    for (int w = 0; w < jobs; ++w) workers.emplace_back(work);
    for (auto& w : workers) w.join();

    std::string csv = "u,v,re_lam_minus,im_lam_minus,re_lam_plus,im_lam_plus,gap,residual,coalesced\n";
    json jrows = json::array();
    for (const auto& r : rows) {
        csv += format_double(r.u) + ',' + format_double(r.v) + ',' +
               format_double(r.lam_minus.real()) + ',' + format_double(r.lam_minus.imag()) + ',' +
               format_double(r.lam_plus.real()) + ',' + format_double(r.lam_plus.imag()) + ',' +
               format_double(r.gap) + ',' + format_double(r.residual) + ',' +
               (r.coalesced ? "1" : "0") + '\n';
        if (opts.format == "json")
            jrows.push_back({{"u", r.u},
                             {"v", r.v},
                             {"gap", r.gap},
                             {"residual", r.residual},
                             {"coalesced", r.coalesced}});
    }
    json jout;
    jout["rows"] = jrows;
    jout["gap_tol"] = gap_tol;
    write_output(opts, meta, csv, jout);
    return 0;
}

// ---------------------------------- commands ----------------------------------

SystemSpec default_two_mode() {
    SystemSpec s;
    s.topology = Topology::Chain;
    s.n = 2;
    s.gamma = {0.0, 0.0};
    return s;
}

UniParams uni_params_from(const SystemSpec& spec, const std::optional<double>& gamma_flag) {
    UniParams p;
    p.epsilon = spec.coupling.epsilon;
    p.kappa = spec.coupling.kappa;
    if (gamma_flag) {
        p.gamma = *gamma_flag;
    } else if (spec.n == 2 && std::abs(spec.gamma[0] + spec.gamma[1]) <
                                  1e-12 * std::max(1.0, std::abs(spec.gamma[0]))) {
        p.gamma = spec.gamma[0] / 2.0;
    } else {
        throw std::invalid_argument(
            "evolve/validate need --gamma or a two-mode config with opposite rates");
    }
    return p;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"spectral singularities and Gaussian dynamics of bosonic mode networks"};
    app.require_subcommand(1);

    CommonOpts o_build, o_spec, o_cls, o_scan, o_evolve, o_mom, o_val;

    auto* cmd_build = app.add_subcommand("build", "emit the dynamical matrix");
    add_common(cmd_build, o_build);

    auto* cmd_spectrum = app.add_subcommand("spectrum", "numeric and cataloged eigenvalues");
    add_common(cmd_spectrum, o_spec);

    auto* cmd_classify = app.add_subcommand("classify", "degeneracy classification");
    add_common(cmd_classify, o_cls);

    auto* cmd_scan = app.add_subcommand("scan-locus", "grid scan over (kappa/eps, gamma-/eps)");
    add_common(cmd_scan, o_scan);
    ScanJob scan_job;
    std::string scan_locus;
    cmd_scan->add_option("--locus", scan_locus, "locus family (default from topology)");
    cmd_scan->add_option("--min", scan_job.lo, "grid lower bound (both axes)");
    cmd_scan->add_option("--max", scan_job.hi, "grid upper bound (both axes)");
    cmd_scan->add_option("--steps", scan_job.steps, "grid points per axis");
    cmd_scan->add_option("--gamma-plus", scan_job.gamma_plus, "common rate offset / epsilon");
    cmd_scan->add_option("--gap-tol", scan_job.gap_tol, "coalescence gap threshold");

    auto* cmd_evolve = app.add_subcommand("evolve", "Gaussian trajectory of the two-mode model");
    add_common(cmd_evolve, o_evolve);
    std::optional<double> ev_gamma;
    double ev_tmax = 0.01, ev_margin = 0.01;
    int ev_steps = 101;
    double a1re = 0, a1im = 0, a2re = 0, a2im = 0;
    cmd_evolve->add_option("--gamma", ev_gamma, "damping/amplification rate parameter");
    cmd_evolve->add_option("--t-max", ev_tmax, "final time");
    cmd_evolve->add_option("--steps", ev_steps, "grid points (includes t = 0)");
    cmd_evolve->add_option("--margin", ev_margin, "validity-window margin");
    cmd_evolve->add_option("--alpha1-re", a1re);
    cmd_evolve->add_option("--alpha1-im", a1im);
    cmd_evolve->add_option("--alpha2-re", a2re);
    cmd_evolve->add_option("--alpha2-im", a2im);

    auto* cmd_moments = app.add_subcommand("moments", "moment-class degeneracy table");
    add_common(cmd_moments, o_mom);
    int mom_k = 2;
    cmd_moments->add_option("--k", mom_k, "moment order");

    auto* cmd_validate = app.add_subcommand("validate", "consistency checks of the two-mode model");
    add_common(cmd_validate, o_val);
    std::optional<double> val_gamma;
    std::vector<double> val_gts = {0.01, 0.1, 0.5};
    cmd_validate->add_option("--gamma", val_gamma, "damping/amplification rate parameter");
    cmd_validate->add_option("--gamma-t", val_gts, "dimensionless times γt")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_build->parsed()) {
            const SystemSpec spec = resolve_spec(o_build, default_two_mode());
            const DynamicalMatrix m = build_system(spec);
            write_output(o_build, spec_to_json(spec).dump(), matrix_to_csv(m), matrix_to_json(m));
            return 0;
        }
        if (cmd_spectrum->parsed()) {
            const SystemSpec spec = resolve_spec(o_spec, default_two_mode());
            const DynamicalMatrix m = build_system(spec);
            std::vector<Complex> numeric;
            for (const auto& c :
                 numeric_eigensystem(m.m, o_spec.cluster_tol > 0 ? o_spec.cluster_tol
                                                                 : default_cluster_tol(m.m)))
                numeric.insert(numeric.end(), c.values.begin(), c.values.end());
            std::sort(numeric.begin(), numeric.end(), [](Complex a, Complex b) {
                if (a.real() != b.real()) return a.real() < b.real();
                return a.imag() < b.imag();
            });
            std::string csv = "index,method,re,im\n";
            json jrows = json::array();
            for (std::size_t i = 0; i < numeric.size(); ++i) {
                csv += std::to_string(i) + ",numeric," + format_double(numeric[i].real()) + ',' +
                       format_double(numeric[i].imag()) + '\n';
                jrows.push_back({{"method", "numeric"}, {"re", numeric[i].real()},
                                 {"im", numeric[i].imag()}});
            }
            try {
                const FullSpectrum lifted = lift_full_spectrum(analytic_eigensystem(spec));
                for (std::size_t i = 0; i < lifted.values.size(); ++i) {
                    csv += std::to_string(i) + ",analytic," +
                           format_double(lifted.values[i].real()) + ',' +
                           format_double(lifted.values[i].imag()) + '\n';
                    jrows.push_back({{"method", "analytic"}, {"re", lifted.values[i].real()},
                                     {"im", lifted.values[i].imag()}});
                }
            } catch (const NoClosedForm&) {
                log_info("no cataloged closed form; numeric spectrum only");
            }
            json jout;
            jout["eigenvalues"] = jrows;
            write_output(o_spec, spec_to_json(spec).dump(), csv, jout);
            return 0;
        }
        if (cmd_classify->parsed()) {
            const SystemSpec spec = resolve_spec(o_cls, default_two_mode());
            const SingularityReport rep =
                classify(build_system(spec), tolerances(o_cls),
                         DeltaGrid{o_cls.delta_min, o_cls.delta_max, o_cls.delta_steps});
            write_output(o_cls, spec_to_json(spec).dump(), report_to_csv(rep), report_to_json(rep));
            return 0;
        }
        if (cmd_scan->parsed()) {
            SystemSpec tmpl = resolve_spec(o_scan, default_two_mode());
            scan_job.spec = tmpl;
            scan_job.locus = scan_locus.empty() ? default_locus(tmpl) : scan_locus;
            return run_scan(scan_job, o_scan, spec_to_json(tmpl).dump());
        }
        if (cmd_evolve->parsed()) {
            SystemSpec spec = o_evolve.config_path.empty() && !o_evolve.epsilon && !o_evolve.kappa
                                  ? default_two_mode()
                                  : resolve_spec(o_evolve, default_two_mode());
            if (o_evolve.epsilon || o_evolve.kappa)
                spec.coupling = CouplingParams(o_evolve.epsilon.value_or(spec.coupling.epsilon),
                                               o_evolve.kappa.value_or(spec.coupling.kappa));
            const UniParams p = uni_params_from(spec, ev_gamma);
            std::vector<double> times(ev_steps);
            for (int k = 0; k < ev_steps; ++k)
                times[k] = ev_steps > 1 ? ev_tmax * k / (ev_steps - 1) : ev_tmax;
            const GaussianTrajectory traj =
                gaussian_evolution(p, {Complex(a1re, a1im), Complex(a2re, a2im)}, times, ev_margin);
            json meta = spec_to_json(uni_spec(p));
            meta["t_max"] = ev_tmax;
            meta["steps"] = ev_steps;
            write_output(o_evolve, meta.dump(), trajectory_to_csv(traj), trajectory_to_json(traj));
            return 0;
        }
        if (cmd_moments->parsed()) {
            const SystemSpec spec = resolve_spec(o_mom, default_two_mode());
            const MomentClassTable table = generate_table(spec, mom_k, tolerances(o_mom));
            json meta = spec_to_json(spec);
            meta["k"] = mom_k;
            write_output(o_mom, meta.dump(), table_to_csv(table), table_to_json(table));
            return 0;
        }
        if (cmd_validate->parsed()) {
            SystemSpec spec = o_val.config_path.empty() && !o_val.epsilon && !o_val.kappa
                                  ? default_two_mode()
                                  : resolve_spec(o_val, default_two_mode());
            if (o_val.epsilon || o_val.kappa)
                spec.coupling = CouplingParams(o_val.epsilon.value_or(spec.coupling.epsilon),
                                               o_val.kappa.value_or(spec.coupling.kappa));
            const UniParams p = uni_params_from(spec, val_gamma);
            const SystemSpec uspec = uni_spec(p);
            const Matrix m = build_system(uspec).m;

            // bidirectional control with the same strengths, both modes damped
            SystemSpec control = default_two_mode();
            control.coupling = uspec.coupling;
            control.gamma = {2.0 * p.gamma, 1.2 * p.gamma};
            const Matrix mc = build_system(control).m;

            std::string csv =
                "gamma_t,comm22_analytic,comm22_recon,comm22_err,"
                "im_comm12_analytic,im_comm12_recon,comm12_err,"
                "reservoir_min_eig,reservoir_physical,control_dev\n";
            json jrows = json::array();
            for (double gt : val_gts) {
                const double t = gt / p.gamma;
                const CommutatorCheck cc = commutator_check(p, t);
                const Matrix k = commutator_matrix(m, uspec.gamma, t);
                const Complex rec22 = k(2, 2);
                const Complex rec12 = k(0, 2);
                const ReservoirCheck rc = reservoir_consistency(p, t);

                Matrix jpat = Matrix::Zero(4, 4);
                for (int q = 0; q < 4; ++q) jpat(q, q) = (q % 2 == 0) ? 1.0 : -1.0;
                const double control_dev =
                    (commutator_matrix(mc, control.gamma, t) - jpat).cwiseAbs().maxCoeff();

                csv += format_double(gt) + ',' + format_double(cc.comm22.real()) + ',' +
                       format_double(rec22.real()) + ',' + format_double(std::abs(cc.comm22 - rec22)) +
                       ',' + format_double(cc.comm12.imag()) + ',' + format_double(rec12.imag()) +
                       ',' + format_double(std::abs(cc.comm12 - rec12)) + ',' +
                       format_double(rc.eigenvalues.minCoeff()) + ',' + (rc.physical ? "1" : "0") +
                       ',' + format_double(control_dev) + '\n';
                jrows.push_back({{"gamma_t", gt},
                                 {"comm22_err", std::abs(cc.comm22 - rec22)},
                                 {"comm12_err", std::abs(cc.comm12 - rec12)},
                                 {"reservoir_min_eig", rc.eigenvalues.minCoeff()},
                                 {"reservoir_physical", rc.physical},
                                 {"control_dev", control_dev}});
            }
            json jout;
            jout["rows"] = jrows;
            write_output(o_val, spec_to_json(uspec).dump(), csv, jout);
            return 0;
        }
    } catch (const Indeterminate& e) {
        std::cerr << "eigenpoint: numerical indeterminacy: " << e.what() << "\n";
        return 3;
    } catch (const QuadratureError& e) {
        std::cerr << "eigenpoint: numerical indeterminacy: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "eigenpoint: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

int run(const std::vector<std::string>& args) {
    std::vector<std::string> full;
    full.reserve(args.size() + 1);
    full.push_back("eigenpoint");
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(full.size());
    for (const auto& a : full) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace eigenpoint::cli
