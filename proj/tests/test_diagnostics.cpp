#include "ncwave/diagnostics.hpp"
#include "ncwave/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace ncwave;

namespace {

CoupledSystem small_system(int order, int m, CouplingMethod method, InterpolationKind kind) {
    auto left = build_block({-10.0, 0.0, 0.0, 10.0, m, m}, 1.0, order);
    auto right = build_block({0.0, 10.0, 0.0, 10.0, 2 * m - 1, 2 * m - 1}, 0.5, order);
    auto spec = make_interface_spec(left, right, kind, method, Orientation::standard);
    return CoupledSystem(std::move(left), std::move(right), std::move(spec));
}

}  // namespace

TEST_CASE("power iteration on a diagonal operator") {
    const Vector d = (Vector(3) << -1.0, -4.0, -9.0).finished();
    const Applicator q = [&d](const Vector& w, Vector& out) { out = d.cwiseProduct(w); };
    PowerIterationOptions opts;
    opts.tol = 1e-12;
    const auto est = spectral_radius(q, 3, opts);
    CHECK(est.rho == doctest::Approx(9.0).epsilon(1e-9));
    CHECK(est.eigenvalue == doctest::Approx(-9.0).epsilon(1e-9));
    CHECK(est.last_change <= 1e-12);

    opts.max_iterations = 3;
    CHECK_THROWS_AS(spectral_radius(q, 3, opts), ConvergenceError);
    CHECK_THROWS_AS(spectral_radius(q, 0), SizingError);
}

TEST_CASE("power iteration is deterministic for a fixed seed") {
    const auto sys = small_system(4, 11, CouplingMethod::projection, InterpolationKind::traditional);
    const auto a = spectral_radius(sys);
    const auto b = spectral_radius(sys);
    CHECK(a.rho == b.rho);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("power iteration agrees with a dense eigensolve at m=11") {
    for (auto method : {CouplingMethod::projection, CouplingMethod::hybrid}) {
        for (auto kind : {InterpolationKind::traditional, InterpolationKind::order_preserving}) {
            const auto sys = small_system(4, 11, method, kind);
            const double dense = oracle::spectrum(sys.assemble_q_dense()).max_abs;
            PowerIterationOptions opts;
            opts.tol = 1e-11;
            const auto est = spectral_radius(sys, opts);
            CHECK(est.rho == doctest::Approx(dense).epsilon(1e-4));
            CHECK(est.rho <= dense * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("scalar helpers") {
    CHECK(scaled_spectral_radius(1066.0, 0.1) == doctest::Approx(10.66));
    CHECK(convergence_rate(1e-3, 1e-4, 101, 201) == doctest::Approx(-1.0 / std::log10(201.0 / 101.0)));
    CHECK(convergence_rate(std::pow(10.0, -4.058), std::pow(10.0, -5.087), 101, 201) ==
          doctest::Approx(-1.029 / std::log10(201.0 / 101.0)));
    CHECK(convergence_rate(0.5, 0.5, 26, 51) == 0.0);

    const Vector w = Vector::Constant(4, 0.01);
    CHECK(hnorm_error(Vector::Ones(4), Vector::Ones(4), w) == 0.0);
    CHECK(hnorm_error(Vector::Unit(4, 2), Vector::Zero(4), w) == doctest::Approx(0.1));
    CHECK_THROWS_AS(hnorm_error(Vector::Zero(3), Vector::Zero(4), w), SizingError);
}

TEST_CASE("discrete energy") {
    const auto sys = small_system(4, 16, CouplingMethod::projection, InterpolationKind::order_preserving);
    const Eigen::Index n = sys.size();
    CHECK(discrete_energy(sys, Vector::Zero(n), Vector::Zero(n)) == 0.0);
    // Constants are in the null space of both blocks' energy matrices.
    CHECK(std::abs(discrete_energy(sys, Vector::Ones(n), Vector::Zero(n))) <= 1e-9);

    std::mt19937_64 rng(11);
    const Vector w = sys.projection()(oracle::random_vector(rng, n));
    const Vector wt = oracle::random_vector(rng, n);
    const DenseMatrix P = oracle::projection(oracle::dense(sys.constraint()), sys.weights());
    const Vector wh = P * w;
    const double expect = wt.dot(sys.weights().cwiseProduct(wt)) +
                          sys.left_part(wh).dot(oracle::dense(sys.left().energy_matrix()) * sys.left_part(wh)) +
                          0.25 * sys.right_part(wh).dot(oracle::dense(sys.right().energy_matrix()) * sys.right_part(wh));
    CHECK(discrete_energy(sys, w, wt) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("analytic solution satisfies the PDE and interface conditions") {
    const AnalyticSolution s(1.0, 0.5);
    CHECK(s.k1() == doctest::Approx(std::sqrt(7.0)));
    CHECK(s.k2() == doctest::Approx((1.0 - 0.25 * std::sqrt(7.0)) / (1.0 + 0.25 * std::sqrt(7.0))));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    for (int i = 0; i < 20; ++i) {
        const double x = U(rng), y = U(rng), t = std::abs(U(rng));
        const double ru = s.u(x, y, t, 0, 0, 2) - (s.u(x, y, t, 2, 0, 0) + s.u(x, y, t, 0, 2, 0));
        const double rv = s.v(x, y, t, 0, 0, 2) - 0.25 * (s.v(x, y, t, 2, 0, 0) + s.v(x, y, t, 0, 2, 0));
        CHECK(std::abs(ru) <= 1e-12);
        CHECK(std::abs(rv) <= 1e-12);
        CHECK(s.u(0.0, y, t) == doctest::Approx(s.v(0.0, y, t)).epsilon(1e-12));
        CHECK(s.u(0.0, y, t, 1) == doctest::Approx(0.25 * s.v(0.0, y, t, 1)).epsilon(1e-12));
    }
    // Time derivatives match finite differences.
    const double e = 1e-5;
    CHECK((s.u(1.3, 2.1, 0.7 + e) - s.u(1.3, 2.1, 0.7 - e)) / (2 * e) ==
          doctest::Approx(s.u(1.3, 2.1, 0.7, 0, 0, 1)).epsilon(1e-8));
    CHECK_THROWS_AS(AnalyticSolution(1.0, 1.5), MisuseError);
}

TEST_CASE("analytic forcing drives the sampled state consistently") {
    const auto sys = small_system(4, 21, CouplingMethod::projection, InterpolationKind::order_preserving);
    const AnalyticSolution s(1.0, 0.5);
    const auto F = s.forcing(sys);
    // Q w + G approximates w_tt for the sampled exact solution.
    const double t = 0.3;
    const Vector w = sys.projection()(s.sample(sys, t));
    const Vector wtt = sys.projection()(s.sample(sys, t, 2));
    const Vector r = sys.apply_q(w) + F.G(t);
    const double err = hnorm_error(r, wtt, sys.weights()) / std::sqrt(wtt.dot(sys.weights().cwiseProduct(wtt)));
    MESSAGE("relative residual " << err);
    CHECK(err < 0.05);
}

TEST_CASE("records CSV round trip") {
    std::vector<ExperimentRecord> rows(2);
    rows[0] = {"projection", 4, "op", 101, 10.6633, -4.238, std::nan(""), 1.5};
    rows[1] = {"hybrid", 6, "traditional", 201, 28.3589, -6.833, -4.83, 0.0};
    std::ostringstream out;
    write_records_csv(out, rows);
    CHECK(out.str().rfind("method,order,interp,m,rho_tilde,log10_error,rate,seconds\n", 0) == 0);
    CHECK(out.str().find(",nan,") != std::string::npos);
    std::istringstream in(out.str());
    const auto back = read_records_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[1].method == "hybrid");
    CHECK(back[1].order == 6);
    CHECK(back[1].rho_tilde == rows[1].rho_tilde);
    CHECK(back[1].rate == rows[1].rate);
    CHECK(std::isnan(back[0].rate));

    std::istringstream bad("method,order,interp,m,rho_tilde,log10_error,rate,seconds\nprojection,4\n");
    CHECK_THROWS_AS(read_records_csv(bad), ConfigError);
}
