#include "ncwave/errors.hpp"
#include "ncwave/harness.hpp"
#include "ncwave/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ncwave;

namespace {

std::string temp_dir(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("ncwave_test_" + name);
    std::filesystem::remove_all(p);
    return p.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("config text round trip") {
    std::istringstream in(
        "# comment\n[physics]\nc1 = 2.5\nc2 = 1.25 # trailing\n[sweep]\nm = 26, 51\nmethods = hybrid\n"
        "interpolations = op\norientation = mirrored\n[simulate]\ninitial = zero\n[run]\nprofile = full\n"
        "seed = 7\ntiming = false\n");
    const auto c = parse_config(in);
    CHECK(c.c1 == 2.5);
    CHECK(c.c2 == 1.25);
    CHECK(c.m_list == std::vector<int>{26, 51});
    CHECK(c.methods == std::vector<CouplingMethod>{CouplingMethod::hybrid});
    CHECK(c.interpolations == std::vector<InterpolationKind>{InterpolationKind::order_preserving});
    CHECK(c.orientation == Orientation::mirrored);
    CHECK(c.initial == InitialCondition::zero);
    CHECK(c.profile == Profile::full);
    CHECK(c.seed == 7);
    CHECK_FALSE(c.timing);

    std::istringstream again(to_text(c));
    const auto d = parse_config(again);
    CHECK(to_text(d) == to_text(c));
    CHECK(d.c1 == c.c1);
}

TEST_CASE("config errors") {
    const auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
    };
    CHECK_THROWS_AS(parse("[physics]\nc1 = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse("[physics]\nc3 = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("c1 = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[physics]\nc1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[physics]\nc2 = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\norders = 8\n"), ConfigError);
    CHECK_THROWS_AS(parse("[run]\nprofile = huge\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/ncwave.cfg"), ConfigError);
}

TEST_CASE("profile filters the resolution list") {
    ExperimentConfig c;
    CHECK(c.active_m() == std::vector<int>{26, 51, 101, 201, 401});
    c.profile = Profile::full;
    CHECK(c.active_m() == std::vector<int>{26, 51, 101, 201, 401, 801});
}

TEST_CASE("triplet files round trip") {
    SparseMatrix a(3, 4);
    a.insert(0, 1) = 0.1;
    a.insert(2, 3) = -1.0 / 3.0;
    a.makeCompressed();
    std::ostringstream out;
    write_triplets(out, a);
    CHECK(out.str().rfind("3 4 2\n0 1 0.10000000000000001\n", 0) == 0);
    std::istringstream in(out.str());
    const SparseMatrix b = read_triplets(in);
    CHECK(b.rows() == 3);
    CHECK(b.cols() == 4);
    CHECK(b.coeff(2, 3) == a.coeff(2, 3));
    CHECK(b.nonZeros() == 2);
}

TEST_CASE("reference tables") {
    CHECK(reference_rho_tilde(4) == 10.66);
    CHECK(reference_rho_tilde(6) == 28.36);
    const auto r = reference_error(CouplingMethod::projection, 4, InterpolationKind::order_preserving, 101);
    REQUIRE(r.has_value());
    CHECK(r->log10_error < -3.0);
    CHECK(std::isfinite(r->rate));
    const auto first = reference_error(CouplingMethod::hybrid, 6, InterpolationKind::traditional, 26);
    REQUIRE(first.has_value());
    CHECK(std::isnan(first->rate));
    CHECK_FALSE(reference_error(CouplingMethod::projection, 4, InterpolationKind::traditional, 33).has_value());
}

TEST_CASE("experiment grids") {
    ExperimentConfig c;
    const auto l = left_grid(c, 26);
    const auto r = right_grid(c, 26);
    CHECK(l.m_x == 26);
    CHECK(r.m_y == 51);
    CHECK(l.x_max == r.x_min);
    CHECK(r.h_x() == doctest::Approx(0.5 * l.h_x()));
}

TEST_CASE("zero initial data gives zero snapshots") {
    ExperimentConfig c;
    c.initial = InitialCondition::zero;
    c.simulate_m = 16;
    c.T = 0.5;
    c.snapshot_times = {0.0, 0.5};
    const std::string dir = temp_dir("zero");
    ensure_directory(dir);
    const auto r = run_simulate(c, dir);
    REQUIRE(r.files.size() == 3);
    CHECK(r.max_drift == 0.0);
    CHECK(all_hard_checks_pass(r.checks));
    std::ifstream in(dir + "/snapshot_t0.5000.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y,value,block");
    long rows = 0;
    bool all_zero = true;
    while (std::getline(in, line)) {
        ++rows;
        const auto a = line.find(',');
        const auto b = line.find(',', a + 1);
        const auto e = line.find(',', b + 1);
        all_zero = all_zero && std::stod(line.substr(b + 1, e - b - 1)) == 0.0;
    }
    CHECK(rows == 16 * 16 + 31 * 31);
    CHECK(all_zero);
}

TEST_CASE("gaussian simulation conserves energy") {
    ExperimentConfig c;
    c.snapshot_times = {1.0};
    const std::string dir = temp_dir("gauss");
    ensure_directory(dir);
    const auto r = run_simulate(c, dir);
    MESSAGE("max drift " << r.max_drift);
    CHECK(r.max_drift <= 1e-6);
    CHECK(all_hard_checks_pass(r.checks));
    CHECK(std::filesystem::exists(dir + "/snapshot_t1.0000.csv"));
    CHECK(read_file(dir + "/energy.csv").rfind("t,E,relative_drift\n", 0) == 0);
}

TEST_CASE("output is deterministic without timing") {
    ExperimentConfig c;
    c.timing = false;
    c.m_list = {26, 51};
    c.orders = {4};
    c.methods = {CouplingMethod::hybrid};
    c.interpolations = {InterpolationKind::traditional};
    c.calibration_m = 26;
    const auto run = [&c] {
        std::ostringstream out;
        write_records_csv(out, run_convergence(c).rows);
        return out.str();
    };
    const std::string a = run();
    CHECK(a == run());
    CHECK(a.find(",0\n") != std::string::npos);
}

TEST_CASE("check bookkeeping") {
    std::vector<Check> checks{make_check("a", 1.0, 1.05, 0.1), make_check("b", 2.0, 1.0, 0.1, true)};
    CHECK(checks[0].passed);
    CHECK_FALSE(checks[1].passed);
    CHECK(all_hard_checks_pass(checks));
    checks.push_back(make_check("c", 2.0, 1.0, 0.1));
    CHECK_FALSE(all_hard_checks_pass(checks));
    std::ostringstream out;
    write_checks(out, checks);
    CHECK(out.str().find("SOFT-FAIL") != std::string::npos);
    CHECK(make_check("nan", std::nan(""), 1.0, 1.0).passed == false);
}
