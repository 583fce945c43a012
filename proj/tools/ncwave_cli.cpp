// ncwave: experiment runner for the two-block wave solver.
#include "ncwave/errors.hpp"
#include "ncwave/harness.hpp"
#include "ncwave/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace ncwave;

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kToleranceBreach = 2;

struct Globals {
    std::string config_path;
    std::string out;
    std::string profile;
    std::optional<std::uint64_t> seed;
};

ExperimentConfig resolve(const Globals& g) {
    ExperimentConfig c = g.config_path.empty() ? ExperimentConfig{} : load_config(g.config_path);
    if (!g.out.empty()) c.out = g.out;
    if (!g.profile.empty()) c.profile = parse_profile(g.profile);
    if (g.seed) c.seed = *g.seed;
    return c;
}

std::ofstream open_out(const ExperimentConfig& c, const std::string& name) {
    ensure_directory(c.out);
    const std::string path = c.out + "/" + name;
    std::ofstream out(path);
    if (!out) throw Error("harness", "cannot write " + path);
    std::cout << "wrote " << path << '\n';
    return out;
}

int report(const std::vector<Check>& checks) {
    write_checks(std::cout, checks);
    return all_hard_checks_pass(checks) ? kOk : kToleranceBreach;
}

int cmd_spectrum(const ExperimentConfig& c) {
    const ExperimentResult r = run_spectrum(c, &std::cout);
    auto out = open_out(c, "spectrum.csv");
    write_records_csv(out, r.rows);
    return report(r.checks);
}

int cmd_converge(const ExperimentConfig& c) {
    std::cout << "rates use consecutive m pairs; profile " << to_string(c.profile) << '\n';
    const ExperimentResult r = run_convergence(c, &std::cout);
    auto out = open_out(c, "convergence.csv");
    write_records_csv(out, r.rows);
    return report(r.checks);
}

int cmd_simulate(const ExperimentConfig& c) {
    const SimulateResult r = run_simulate(c, c.out, &std::cout);
    for (const auto& f : r.files) std::cout << "wrote " << f << '\n';
    return report(r.checks);
}

int cmd_verify(const ExperimentConfig& c) {
    const auto rows = run_verify(c, &std::cerr);
    auto out = open_out(c, "verify.csv");
    write_properties_csv(out, rows);
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.passed ? 0 : 1;
    std::cout << rows.size() - failed << " of " << rows.size() << " properties passed\n";
    return failed == 0 ? kOk : kToleranceBreach;
}

struct DumpArgs {
    std::string op = "q";
    int order = 4;
    int m = 11;
    std::string method = "projection";
    std::string interp = "traditional";
    std::string orientation = "standard";
    bool to_stdout = false;
};

SparseMatrix pick_operator(const ExperimentConfig& c, const DumpArgs& a) {
    const std::string& op = a.op;
    if (op == "d2" || op == "h" || op == "m") {
        const SbpOperator1D s = build_sbp_d2(a.order, a.m, 1.0 / (a.m - 1));
        if (op == "d2") return s.D2;
        if (op == "m") return s.M;
        return diagonal_matrix(s.H);
    }
    if (op == "c2f" || op == "f2c") {
        const InterpolationPair p = build_interpolation_pair(a.order, parse_interpolation_kind(a.interp), a.m);
        return op == "c2f" ? p.coarse_to_fine : p.fine_to_coarse;
    }
    ExperimentConfig cc = c;
    cc.orientation = parse_orientation(a.orientation);
    const CoupledSystem sys =
        build_experiment_system(cc, a.m, a.order, parse_coupling_method(a.method), parse_interpolation_kind(a.interp));
    if (op == "l") return sys.constraint();
    if (op == "sat") return sys.interface_sat();
    if (op == "q") {
        if (sys.size() > 20000) throw SizingError("harness", "Q is only assembled for small m");
        return sys.assemble_q_dense().sparseView(0.0, 0.0);
    }
    throw ConfigError("unknown operator '" + op + "'");
}

int cmd_dump(const ExperimentConfig& c, const DumpArgs& a) {
    const SparseMatrix op = pick_operator(c, a);
    if (a.to_stdout) {
        write_triplets(std::cout, op);
        return kOk;
    }
    auto out = open_out(c, a.op + "_order" + std::to_string(a.order) + "_m" + std::to_string(a.m) + ".txt");
    write_triplets(out, op);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-block SBP wave solver: spectra, convergence, simulation, operator checks"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "Experiment config (key = value with [sections])")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--profile", g.profile, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    app.add_option("--seed", g.seed, "RNG seed");

    auto* spectrum = app.add_subcommand("spectrum", "Scaled spectral radius of the coupled and single-block operators");
    auto* converge = app.add_subcommand("converge", "Manufactured-solution convergence sweep");
    auto* simulate = app.add_subcommand("simulate", "Single run with snapshots and an energy trace");
    auto* verify = app.add_subcommand("verify-ops", "Certify operators and projection identities");
    auto* dump = app.add_subcommand("dump-op", "Write an operator as coordinate triplets");
    DumpArgs d;
    dump->add_option("--op", d.op, "d2, h, m, c2f, f2c, l, sat or q")
        ->check(CLI::IsMember({"d2", "h", "m", "c2f", "f2c", "l", "sat", "q"}));
    dump->add_option("--order", d.order, "4 or 6")->check(CLI::IsMember({4, 6}));
    dump->add_option("--m", d.m, "points (coarse side for interface operators)");
    dump->add_option("--method", d.method, "projection or hybrid");
    dump->add_option("--interp", d.interp, "traditional or op");
    dump->add_option("--orientation", d.orientation, "standard or mirrored");
    dump->add_flag("--stdout", d.to_stdout, "Write to standard output");
    for (auto* sub : {spectrum, converge, simulate, verify, dump}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kRuntimeError;
    }

    try {
        const ExperimentConfig c = resolve(g);
        if (*spectrum) return cmd_spectrum(c);
        if (*converge) return cmd_converge(c);
        if (*simulate) return cmd_simulate(c);
        if (*verify) return cmd_verify(c);
        if (*dump) return cmd_dump(c, d);
    } catch (const Error& e) {
        std::cerr << "error [" << e.module() << "]: " << e.what() << '\n';
        return kRuntimeError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kRuntimeError;
}
