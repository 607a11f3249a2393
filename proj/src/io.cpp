#include "eigenpoint/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace eigenpoint {

using nlohmann::json;

std::string topology_name(Topology t) {
    switch (t) {
        case Topology::Circular4: return "circular4";
        case Topology::Tetrahedral4: return "tetrahedral4";
        case Topology::Chain: return "chain";
        case Topology::UniConcat: return "uniconcat";
    }
    return "chain";
}

Topology topology_from_name(const std::string& name) {
    if (name == "circular4") return Topology::Circular4;
    if (name == "tetrahedral4") return Topology::Tetrahedral4;
    if (name == "chain") return Topology::Chain;
    if (name == "uniconcat") return Topology::UniConcat;
    throw std::invalid_argument("unknown topology: " + name);
}

namespace {

std::string kind_name(CouplingKind k) {
    switch (k) {
        case CouplingKind::Xi: return "xi";
        case CouplingKind::Hamiltonian1: return "hamiltonian-1";
        case CouplingKind::Hamiltonian2: return "hamiltonian-2";
    }
    return "xi";
}

CouplingKind kind_from_name(const std::string& name) {
    if (name == "xi") return CouplingKind::Xi;
    if (name == "hamiltonian-1") return CouplingKind::Hamiltonian1;
    if (name == "hamiltonian-2") return CouplingKind::Hamiltonian2;
    throw std::invalid_argument("unknown coupling kind: " + name);
}

}  // namespace

SystemSpec spec_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("spec: expected a JSON object");
    SystemSpec spec;
    spec.topology = topology_from_name(j.at("topology").get<std::string>());
    spec.n = j.at("n").get<int>();
    const double eps = j.at("epsilon").get<double>();
    const double kap = j.at("kappa").get<double>();
    spec.coupling = CouplingParams(eps, kap);  // rejects negative strengths
    spec.gamma = j.at("gamma").get<std::vector<double>>();
    if (j.contains("constraint") && !j.at("constraint").is_null())
        spec.constraint = j.at("constraint").get<std::string>();
    if (j.contains("concat") && !j.at("concat").is_null()) {
        const json& c = j.at("concat");
        ConcatSpec cs;
        cs.left = c.at("left").get<int>();
        cs.right = c.at("right").get<int>();
        if (c.contains("edges") && !c.at("edges").is_null())
            for (const auto& e : c.at("edges"))
                cs.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        if (c.contains("kind") && !c.at("kind").is_null())
            cs.kind = kind_from_name(c.at("kind").get<std::string>());
        spec.concat = cs;
    }
    validate_spec(spec);
    return spec;
}

json spec_to_json(const SystemSpec& spec) {
    json j;
    j["topology"] = topology_name(spec.topology);
    j["n"] = spec.n;
    j["epsilon"] = spec.coupling.epsilon;
    j["kappa"] = spec.coupling.kappa;
    j["gamma"] = spec.gamma;
    j["constraint"] = spec.constraint ? json(*spec.constraint) : json(nullptr);
    if (spec.concat) {
        json c;
        c["left"] = spec.concat->left;
        c["right"] = spec.concat->right;
        json edges = json::array();
        for (const auto& [l, r] : spec.concat->edges) edges.push_back({l, r});
        if (edges.empty()) edges.push_back({spec.concat->left, 1});  // the effective default
        c["edges"] = edges;
        c["kind"] = kind_name(spec.concat->kind);
        j["concat"] = c;
    } else {
        j["concat"] = nullptr;
    }
    return j;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_complex(Complex v) {
    std::string s = format_double(v.real());
    s += (v.imag() < 0 ? "-" : "+");
    s += format_double(std::abs(v.imag()));
    s += "i";
    return s;
}

json matrix_to_json(const DynamicalMatrix& m) {
    json j;
    j["dim"] = m.dim();
    j["modes"] = m.modes;
    j["reduced"] = m.reduced;
    json rows = json::array();
    for (int i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (int k = 0; k < m.dim(); ++k) row.push_back({m.m(i, k).real(), m.m(i, k).imag()});
        rows.push_back(row);
    }
    j["entries"] = rows;
    return j;
}

std::string matrix_to_csv(const DynamicalMatrix& m) {
    std::ostringstream out;
    out << "i,j,re,im\n";
    for (int i = 0; i < m.dim(); ++i)
        for (int k = 0; k < m.dim(); ++k)
            out << i << ',' << k << ',' << format_double(m.m(i, k).real()) << ','
                << format_double(m.m(i, k).imag()) << '\n';
    return out.str();
}

json report_to_json(const SingularityReport& rep) {
    json j;
    j["kind"] = to_string(rep.kind);
    j["ed"] = rep.ed_order;
    j["dd"] = rep.dd_order;
    j["eigenvalue"] = {rep.eigenvalue.real(), rep.eigenvalue.imag()};
    json clusters = json::array();
    for (const auto& c : rep.jordan.clusters) {
        json jc;
        jc["eigenvalue"] = {c.eigenvalue.real(), c.eigenvalue.imag()};
        jc["multiplicity"] = c.multiplicity;
        jc["block_sizes"] = c.block_sizes;
        clusters.push_back(jc);
    }
    j["clusters"] = clusters;
    j["similarity_condition"] = std::isfinite(rep.jordan.similarity_condition)
                                    ? json(rep.jordan.similarity_condition)
                                    : json("inf");
    j["slope"] = std::isnan(rep.slope) ? json(nullptr) : json(rep.slope);
    j["min_overlap"] = std::isnan(rep.min_overlap) ? json(nullptr) : json(rep.min_overlap);
    return j;
}

std::string report_to_csv(const SingularityReport& rep) {
    std::ostringstream out;
    out << "kind,ed,dd,eig_re,eig_im,slope,min_overlap\n";
    out << to_string(rep.kind) << ',' << rep.ed_order << ',' << rep.dd_order << ','
        << format_double(rep.eigenvalue.real()) << ',' << format_double(rep.eigenvalue.imag())
        << ',' << format_double(rep.slope) << ',' << format_double(rep.min_overlap) << '\n';
    return out.str();
}

json table_to_json(const MomentClassTable& table) {
    json j;
    j["k"] = table.k;
    json part = json::array();
    for (const auto& c : table.partition.clusters)
        part.push_back({{"lambda", {c.lambda.real(), c.lambda.imag()}}, {"n", c.n}});
    j["partition"] = part;
    json rows = json::array();
    for (const auto& r : table.rows) {
        json row;
        row["label"] = r.label;
        row["k_vector"] = r.cls.k_vector;
        row["lambda_re"] = r.cls.lambda.real();
        row["lambda_im"] = r.cls.lambda.imag();
        row["ed_combined"] = r.ed_combined;
        row["dd_combined"] = r.dd_combined;
        row["ed_genuine"] = r.ed_genuine;
        row["dd_genuine"] = r.dd_genuine;
        row["dd_combined_total"] = r.dd_combined_total;
        row["dd_genuine_total"] = r.dd_genuine_total;
        row["moments"] = r.monomials;
        row["orderings"] = r.orderings;
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

std::string table_to_csv(const MomentClassTable& table) {
    std::ostringstream out;
    out << "label,k_vector,lambda_re,lambda_im,ed_combined,dd_combined,ed_genuine,dd_genuine,"
           "dd_combined_total,dd_genuine_total,n_moments,moments,orderings\n";
    for (const auto& r : table.rows) {
        out << '"' << r.label << "\",";
        for (std::size_t i = 0; i < r.cls.k_vector.size(); ++i)
            out << (i ? " " : "") << r.cls.k_vector[i];
        out << ',' << format_double(r.cls.lambda.real()) << ','
            << format_double(r.cls.lambda.imag()) << ',' << r.ed_combined << ',' << r.dd_combined
            << ',' << r.ed_genuine << ',' << r.dd_genuine << ',' << r.dd_combined_total << ','
            << r.dd_genuine_total << ',' << r.monomials.size() << ",\"";
        for (std::size_t i = 0; i < r.monomials.size(); ++i)
            out << (i ? ";" : "") << r.monomials[i];
        out << "\",\"";
        for (std::size_t i = 0; i < r.orderings.size(); ++i) out << (i ? ";" : "") << r.orderings[i];
        out << "\"\n";
    }
    return out.str();
}

json trajectory_to_json(const GaussianTrajectory& traj) {
    json j;
    j["gamma"] = traj.params.gamma;
    j["epsilon"] = traj.params.epsilon;
    j["kappa"] = traj.params.kappa;
    json rows = json::array();
    for (const auto& s : traj.samples) {
        json row;
        row["t"] = s.t;
        row["alpha1"] = {s.alpha1.real(), s.alpha1.imag()};
        row["alpha2"] = {s.alpha2.real(), s.alpha2.imag()};
        row["B2"] = s.b2;
        row["C2"] = {s.c2.real(), s.c2.imag()};
        row["D"] = {s.d.real(), s.d.imag()};
        row["tau1"] = s.tau1;
        row["tau2"] = s.tau2;
        row["nu_minus"] = s.nu_minus;
        row["EN"] = s.en;
        row["EN_short_time"] = s.en_short;
        row["comm22_minus_1"] = s.comm22.real() - 1.0;
        row["Im_comm12"] = s.comm12.imag();
        row["valid"] = s.valid;
        rows.push_back(row);
    }
    j["samples"] = rows;
    return j;
}

std::string trajectory_to_csv(const GaussianTrajectory& traj) {
    std::ostringstream out;
    out << "t,re_alpha1,im_alpha1,re_alpha2,im_alpha2,B2,re_C2,im_C2,re_D,im_D,tau1,tau2,"
           "nu_minus,EN,EN_short_time,comm22_minus_1,Im_comm12,valid\n";
    for (const auto& s : traj.samples) {
        out << format_double(s.t) << ',' << format_double(s.alpha1.real()) << ','
            << format_double(s.alpha1.imag()) << ',' << format_double(s.alpha2.real()) << ','
            << format_double(s.alpha2.imag()) << ',' << format_double(s.b2) << ','
            << format_double(s.c2.real()) << ',' << format_double(s.c2.imag()) << ','
            << format_double(s.d.real()) << ',' << format_double(s.d.imag()) << ','
            << format_double(s.tau1) << ',' << format_double(s.tau2) << ','
            << format_double(s.nu_minus) << ',' << format_double(s.en) << ','
            << format_double(s.en_short) << ',' << format_double(s.comm22.real() - 1.0) << ','
            << format_double(s.comm12.imag()) << ',' << (s.valid ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace eigenpoint
