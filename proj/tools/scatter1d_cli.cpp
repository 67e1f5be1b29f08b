#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <scatter1d/scatter1d.hpp>

using namespace scatter1d;
using io::fmt;
using io::json;

namespace {

enum Exit { ok = 0, parse_failure = 2, solver_failure = 3, singular = 4, design_failure = 5 };

// Raised to stop a subcommand with a specific exit code after output has been written.
struct exit_with {
    int code;
};

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io::parse_error("cannot write '" + path + "'");
    out << text;
}

Solver parse_solver(const std::string& s) {
    if (s == "auto") return Solver::automatic;
    if (s == "exact") return Solver::exact;
    if (s == "dynamical") return Solver::dynamical;
    throw io::parse_error("unknown solver '" + s + "' (auto, exact, dynamical)");
}

const char* solver_name(const Potential& p, Solver s) {
    if (s == Solver::exact || (s == Solver::automatic && is_closed_form(p))) return "exact";
    return "dynamical";
}

unsigned thread_count(int requested) {
    if (requested > 0) return unsigned(requested);
    if (const char* env = std::getenv("SCATTER1D_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 0) throw io::parse_error("SCATTER1D_THREADS must be a non-negative integer");
        return unsigned(n);
    }
    return 0;
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw io::parse_error(std::string(what) + " must be positive");
}

json amplitude_fields(json rec, const ScatteringData& d) {
    rec["R_l"] = io::complex_json(d.reflection_left);
    rec["R_r"] = io::complex_json(d.reflection_right);
    rec["T"] = io::complex_json(d.transmission);
    return rec;
}

// ---- solve ----

struct SolveArgs {
    std::string spec;
    double k = 0.0;
    std::string solver = "auto";
    double tol = 1e-10;
    std::string output;
};

int cmd_solve(const SolveArgs& a) {
    const auto p = io::load_potential(a.spec);
    require_positive(a.k, "k");
    require_positive(a.tol, "tolerance");
    const Solver solver = parse_solver(a.solver);
    const auto M = transfer_matrix(p, a.k, solver, a.tol);
    const auto cls = classify(M);
    json rec{{"version", io::schema_version}, {"k", a.k}, {"solver", solver_name(p, solver)}};
    rec["M"] = io::matrix_json(M);
    int code = ok;
    if (cls.spectral_singularity) {
        rec["R_l"] = nullptr;
        rec["R_r"] = nullptr;
        rec["T"] = nullptr;
        code = singular;
    } else {
        rec = amplitude_fields(std::move(rec), amplitudes_from_matrix(M));
    }
    rec["det_residual"] = M.det_residual();
    rec["classification"] = io::classification_json(cls);
    write_text(a.output, io::dump(rec) + "\n");
    return code;
}

// ---- scan ----

struct ScanArgs {
    std::string spec;
    double k_min = 0.0, k_max = 0.0;
    int points = 0;
    std::string solver = "auto";
    double tol = 1e-10;
    double zero_tol = default_zero_tol;
    int threads = 0;
    std::string output;
    std::string summary;
};

std::string scan_csv(const ScanResult& r) {
    std::string out =
        "k,M11_re,M11_im,M12_re,M12_im,M21_re,M21_im,M22_re,M22_im,"
        "Rl_re,Rl_im,Rr_re,Rr_im,T_re,T_im,det_residual,unitarity,flags\n";
    for (const auto& pt : r.points) {
        out += fmt(pt.k);
        if (pt.matrix) {
            for (cplx z : {pt.matrix->m11(), pt.matrix->m12(), pt.matrix->m21(), pt.matrix->m22()})
                out += "," + io::csv_complex(z);
        } else {
            out += ",,,,,,,,";
        }
        if (pt.amplitudes) {
            const auto& d = *pt.amplitudes;
            out += "," + io::csv_complex(d.reflection_left) + "," + io::csv_complex(d.reflection_right) + "," +
                   io::csv_complex(d.transmission);
        } else {
            out += ",,,,,,";
        }
        out += pt.matrix ? "," + fmt(pt.matrix->det_residual()) : ",";
        out += pt.amplitudes ? "," + fmt(std::norm(pt.amplitudes->reflection_left) +
                                         std::norm(pt.amplitudes->transmission) - 1.0)
                             : ",";
        std::vector<std::string> flags = pt.classification.names();
        if (!pt.error.empty()) flags.push_back("error");
        out += "," + io::join(flags, ';') + "\n";
    }
    return out;
}

json scan_summary(const Potential& p, const ScanArgs& a, const ScanResult& r) {
    json sps = json::array();
    int n_ss = 0;
    for (const auto& sp : r.singular_points) {
        const auto& z = sp.zero;
        json e{{"entry", entry_name(z.entry)}, {"kind", zero_meaning(z.entry)}, {"k", z.k},
               {"residual", z.residual}, {"verification_residual", z.verification_residual},
               {"self_dual", sp.self_dual}};
        if (z.entry == Entry::m22) {
            ++n_ss;
            e["product_residual"] = std::abs(z.matrix.m12() * z.matrix.m21() + 1.0);
        }
        if (z.cpa_ratio) e["cpa_ratio"] = io::complex_json(*z.cpa_ratio);
        e["M"] = io::matrix_json(z.matrix);
        sps.push_back(std::move(e));
    }
    json zeros = json::array();
    for (Entry e : r.identically_zero) zeros.push_back(entry_name(e));
    double worst_unitarity = 0.0;
    int failed = 0;
    for (const auto& pt : r.points) {
        if (!pt.error.empty()) ++failed;
        if (pt.amplitudes)
            worst_unitarity = std::max(worst_unitarity, std::abs(std::norm(pt.amplitudes->reflection_left) +
                                                                 std::norm(pt.amplitudes->transmission) - 1.0));
    }
    json s{{"version", io::schema_version},
           {"k_min", a.k_min},
           {"k_max", a.k_max},
           {"points", int(r.points.size())},
           {"solver", solver_name(p, parse_solver(a.solver))},
           {"real_potential", is_real(p)},
           {"spectral_singularities", n_ss},
           {"singular_points", sps},
           {"identically_zero", zeros},
           {"max_unitarity_violation", worst_unitarity},
           {"failed_points", failed}};
    return s;
}

int cmd_scan(const ScanArgs& a) {
    const auto p = io::load_potential(a.spec);
    require_positive(a.k_min, "k-min");
    if (!(a.k_max > a.k_min)) throw io::parse_error("k-max must exceed k-min");
    require_positive(a.tol, "tolerance");
    require_positive(a.zero_tol, "zero tolerance");
    ScanOptions opt;
    opt.solver = parse_solver(a.solver);
    opt.tol = a.tol;
    opt.zero_tol = a.zero_tol;
    opt.threads = thread_count(a.threads);
    const int points = a.points > 0 ? a.points : default_scan_points(p, a.k_min, a.k_max);
    const auto r = scan(p, a.k_min, a.k_max, points, opt);
    write_text(a.output, scan_csv(r));
    const std::string summary = io::dump(scan_summary(p, a, r)) + "\n";
    if (!a.summary.empty())
        write_text(a.summary, summary);
    else if (!a.output.empty() && a.output != "-")
        write_text("-", summary);
    for (const auto& pt : r.points)
        if (!pt.error.empty()) return solver_failure;
    return ok;
}

// ---- approx ----

struct ApproxArgs {
    std::string spec;
    double k = 0.0;
    double tol = 1e-12;
    std::string output;
};

json approx_record(const char* name, const ScatteringData& d, const ScatteringData& exact) {
    json rec{{"method", name}};
    rec = amplitude_fields(std::move(rec), d);
    rec["max_abs_error"] = std::max({std::abs(d.reflection_left - exact.reflection_left),
                             std::abs(d.reflection_right - exact.reflection_right),
                             std::abs(d.transmission - exact.transmission)});
    return rec;
}

int cmd_approx(const ApproxArgs& a) {
    const auto p = io::load_potential(a.spec);
    require_positive(a.k, "k");
    require_positive(a.tol, "tolerance");
    const auto M = transfer_matrix(p, a.k, Solver::automatic, a.tol);
    const auto exact = amplitudes_from_matrix(M);
    json reference{{"method", solver_name(p, Solver::automatic)}};
    reference = amplitude_fields(std::move(reference), exact);
    json methods = json::array();
    methods.push_back(approx_record("born1", born_first(p, a.k), exact));
    for (int order : {1, 2}) {
        const char* name = order == 1 ? "dyson1" : "dyson2";
        try {
            const auto rep = order == 1 ? dyson_order1(p, a.k) : dyson_order2(p, a.k);
            methods.push_back(approx_record(name, rep.amplitudes, exact));
        } catch (const spectral_singularity_error&) {
            methods.push_back(json{{"method", name}, {"max_abs_error", nullptr}, {"note", "truncated M22 vanishes"}});
        }
    }
    json rec{{"version", io::schema_version}, {"k", a.k}, {"reference", reference}, {"approximations", methods}};
    write_text(a.output, io::dump(rec) + "\n");
    return ok;
}

// ---- design ----

struct TargetArgs {
    double k0 = 0.0;
    std::string r_left = "0", r_right = "0", transmission = "1";

    DesignSpec spec() const {
        require_positive(k0, "k0");
        DesignSpec s;
        s.k0 = k0;
        s.reflection_left = io::parse_complex(r_left);
        s.reflection_right = io::parse_complex(r_right);
        s.transmission = io::parse_complex(transmission);
        if (s.transmission == cplx{0.0}) throw io::parse_error("zero transmission unrealizable");
        return s;
    }
};

struct DesignArgs {
    TargetArgs target;
    double verify_tol = 1e-6;
    int winding = 0;
    double gap = 1.0;
    double origin = 0.0;
    int profile_points = 2049;
    std::string output;
    std::string profile;
    std::string report;
};

json target_json(const DesignSpec& s) {
    return json{{"k0", s.k0},
                {"R_l", io::complex_json(s.reflection_left)},
                {"R_r", io::complex_json(s.reflection_right)},
                {"T", io::complex_json(s.transmission)}};
}

int cmd_design(const DesignArgs& a) {
    const DesignSpec spec = a.target.spec();
    require_positive(a.verify_tol, "verification tolerance");
    if (a.winding < 0) throw io::parse_error("winding must be non-negative");
    DesignOptions opt;
    opt.verify_tol = a.verify_tol;
    opt.winding = a.winding;
    Placement place;
    place.origin = a.origin;
    place.min_gap = a.gap;

    json report{{"version", io::schema_version}, {"target", target_json(spec)}};
    DesignResult res;
    try {
        res = solve_single_mode(spec, place, opt);
    } catch (const verification_failure& e) {
        report["verified"] = false;
        report["failure"] = e.what();
        write_text(a.report.empty() ? "-" : a.report, io::dump(report) + "\n");
        throw exit_with{design_failure};
    }
    report["case"] = res.plan.case_id;
    report["rho"] = io::complex_json(res.plan.rho);
    json blocks = json::array();
    for (const auto& b : res.blocks) {
        blocks.push_back(json{{"orientation", b.orientation == Orientation::right_invisible ? "right_invisible"
                                                                                           : "left_invisible"},
                              {"reflection", io::complex_json(b.reflection)},
                              {"winding", b.profile.winding},
                              {"alpha", b.profile.shape},
                              {"support", json::array({b.support_interval.lo, b.support_interval.hi})},
                              {"matrix_error", b.check.matrix_error},
                              {"suppressed_reflection", b.check.suppressed_reflection},
                              {"transmission_error", b.check.transmission_error},
                              {"reflection_error", b.check.reflection_error}});
    }
    report["blocks"] = blocks;
    report["realized"] = io::matrix_json(res.realized);
    report["residual"] = res.residual;
    report["verified"] = true;

    const std::string doc = io::dump(io::document(res.potential)) + "\n";
    write_text(a.output, doc);
    if (!a.profile.empty()) write_text(a.profile, io::profile_csv(res.potential, a.profile_points));
    if (!a.report.empty())
        write_text(a.report, io::dump(report) + "\n");
    else if (!a.output.empty() && a.output != "-")
        write_text("-", io::dump(report) + "\n");
    return ok;
}

// ---- verify ----

struct VerifyArgs {
    std::string spec;
    TargetArgs target;
    double tol = 1e-6;
    std::string solver = "auto";
    double solver_tol = 1e-12;
    std::string output;
};

int cmd_verify(const VerifyArgs& a) {
    const auto p = io::load_potential(a.spec);
    const DesignSpec spec = a.target.spec();
    require_positive(a.tol, "tolerance");
    const Solver solver = parse_solver(a.solver);
    const auto M = transfer_matrix(p, spec.k0, solver, a.solver_tol);
    const double matrix_error = max_diff(M.m, spec.target_matrix().m);
    json rec{{"version", io::schema_version}, {"target", target_json(spec)}, {"solver", solver_name(p, solver)}};
    rec["M"] = io::matrix_json(M);
    bool pass = matrix_error <= a.tol;
    if (classify(M).spectral_singularity) {
        rec["R_l"] = rec["R_r"] = rec["T"] = nullptr;
        pass = false;
    } else {
        const auto d = amplitudes_from_matrix(M);
        rec = amplitude_fields(std::move(rec), d);
        rec["R_l_error"] = std::abs(d.reflection_left - spec.reflection_left);
        rec["R_r_error"] = std::abs(d.reflection_right - spec.reflection_right);
        rec["T_error"] = std::abs(d.transmission - spec.transmission);
    }
    rec["matrix_error"] = matrix_error;
    rec["tolerance"] = a.tol;
    rec["verified"] = pass;
    write_text(a.output, io::dump(rec) + "\n");
    return pass ? ok : design_failure;
}

void add_target(CLI::App* cmd, TargetArgs& t) {
    cmd->add_option("--k0", t.k0, "design wavenumber")->required();
    cmd->add_option("--rl", t.r_left, "target left reflection (re,im or mag@deg)");
    cmd->add_option("--rr", t.r_right, "target right reflection");
    cmd->add_option("--t", t.transmission, "target transmission");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scatter1d: transfer-matrix scattering by complex finite-range potentials"};
    app.require_subcommand(1);

    SolveArgs solve_a;
    auto* solve_cmd = app.add_subcommand("solve", "transfer matrix and amplitudes at one wavenumber");
    solve_cmd->add_option("spec", solve_a.spec, "potential JSON")->required();
    solve_cmd->add_option("--k", solve_a.k, "wavenumber")->required();
    solve_cmd->add_option("--solver", solve_a.solver, "auto, exact or dynamical");
    solve_cmd->add_option("--tol", solve_a.tol, "dynamical tolerance");
    solve_cmd->add_option("-o,--output", solve_a.output, "JSON output path (default stdout)");

    ScanArgs scan_a;
    auto* scan_cmd = app.add_subcommand("scan", "grid scan with zero refinement");
    scan_cmd->add_option("spec", scan_a.spec, "potential JSON")->required();
    scan_cmd->add_option("--k-min", scan_a.k_min, "lower end of the k grid")->required();
    scan_cmd->add_option("--k-max", scan_a.k_max, "upper end of the k grid")->required();
    scan_cmd->add_option("--points", scan_a.points, "grid size (default 512 per unit k times support length)");
    scan_cmd->add_option("--solver", scan_a.solver, "auto, exact or dynamical");
    scan_cmd->add_option("--tol", scan_a.tol, "dynamical tolerance");
    scan_cmd->add_option("--zero-tol", scan_a.zero_tol, "relative threshold for a zero entry");
    scan_cmd->add_option("--threads", scan_a.threads, "worker threads (default SCATTER1D_THREADS, then all cores)");
    scan_cmd->add_option("-o,--output", scan_a.output, "CSV output path (default stdout)");
    scan_cmd->add_option("--summary", scan_a.summary, "JSON summary path");

    ApproxArgs approx_a;
    auto* approx_cmd = app.add_subcommand("approx", "Born and Dyson approximations against the exact amplitudes");
    approx_cmd->add_option("spec", approx_a.spec, "potential JSON")->required();
    approx_cmd->add_option("--k", approx_a.k, "wavenumber")->required();
    approx_cmd->add_option("--tol", approx_a.tol, "reference solver tolerance");
    approx_cmd->add_option("-o,--output", approx_a.output, "JSON output path (default stdout)");

    DesignArgs design_a;
    auto* design_cmd = app.add_subcommand("design", "build a potential with prescribed amplitudes at k0");
    add_target(design_cmd, design_a.target);
    design_cmd->add_option("--verify-tol", design_a.verify_tol, "max-norm tolerance for the forward check");
    design_cmd->add_option("--winding", design_a.winding, "winding per block (0: smallest with alpha <= 1e-2)");
    design_cmd->add_option("--gap", design_a.gap, "minimum gap between blocks in units of pi/k0");
    design_cmd->add_option("--origin", design_a.origin, "left edge of the design");
    design_cmd->add_option("--profile-points", design_a.profile_points, "samples in the profile CSV");
    design_cmd->add_option("-o,--output", design_a.output, "potential JSON path (default stdout)");
    design_cmd->add_option("--profile", design_a.profile, "profile CSV path");
    design_cmd->add_option("--report", design_a.report, "verification report JSON path");

    VerifyArgs verify_a;
    auto* verify_cmd = app.add_subcommand("verify", "check a potential against target amplitudes at k0");
    verify_cmd->add_option("spec", verify_a.spec, "potential JSON")->required();
    add_target(verify_cmd, verify_a.target);
    verify_cmd->add_option("--tol", verify_a.tol, "max-norm tolerance on the transfer matrix");
    verify_cmd->add_option("--solver", verify_a.solver, "auto, exact or dynamical");
    verify_cmd->add_option("--solver-tol", verify_a.solver_tol, "dynamical tolerance");
    verify_cmd->add_option("-o,--output", verify_a.output, "JSON output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : parse_failure;
    }

    try {
        if (*solve_cmd) return cmd_solve(solve_a);
        if (*scan_cmd) return cmd_scan(scan_a);
        if (*approx_cmd) return cmd_approx(approx_a);
        if (*design_cmd) return cmd_design(design_a);
        if (*verify_cmd) return cmd_verify(verify_a);
    } catch (const exit_with& e) {
        return e.code;
    } catch (const invalid_input& e) {
        std::cerr << "error: " << e.what() << "\n";
        return parse_failure;
    } catch (const spectral_singularity_error& e) {
        std::cerr << "error: " << e.what() << " at k = " << fmt(e.k) << "\n";
        return singular;
    } catch (const verification_failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return design_failure;
    } catch (const placement_conflict& e) {
        std::cerr << "error: " << e.what() << "\n";
        return design_failure;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return solver_failure;
    }
    return ok;
}
