#include "ncwave/errors.hpp"
#include "ncwave/time_integration.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace ncwave;

namespace {

Applicator scalar(double omega) {
    return [omega](const Vector& w, Vector& out) { out = -omega * omega * w; };
}

Vector one(double v) { return Vector::Constant(1, v); }

double oscillator_error(double omega, double k, double T) {
    IntegratorConfig cfg;
    cfg.k = k;
    cfg.T = T;
    const auto r = integrate(scalar(omega), {}, one(1.0), one(0.0), cfg);
    return std::abs(r.state.w_curr[0] - std::cos(omega * T));
}

}  // namespace

TEST_CASE("max stable step") {
    CHECK(max_stable_step(12.0, 1.0) == doctest::Approx(1.0));
    CHECK(max_stable_step(10.66, 0.1) == doctest::Approx(0.10610).epsilon(1e-4));
    CHECK(max_stable_step(28.36, 0.1) == doctest::Approx(0.06505).epsilon(1e-3));
    CHECK_THROWS_AS(max_stable_step(0.0, 0.1), MisuseError);
}

TEST_CASE("step count lands exactly on T") {
    CHECK(steps_to(2.0, 0.1) == 20);
    CHECK(steps_to(2.0, 0.3) == 7);
    IntegratorConfig cfg;
    cfg.k = 0.3;
    cfg.T = 2.0;
    const auto r = integrate(scalar(1.0), {}, one(1.0), one(0.0), cfg);
    CHECK(r.steps == 7);
    CHECK(r.k == doctest::Approx(2.0 / 7.0));
    CHECK(r.state.n == 7);
    CHECK(r.state.t == 2.0);
}

TEST_CASE("scalar oscillator converges at fourth order") {
    const double omega = 2.0, T = 3.0;
    const double e1 = oscillator_error(omega, 0.02, T);
    const double e2 = oscillator_error(omega, 0.01, T);
    const double e3 = oscillator_error(omega, 0.005, T);
    MESSAGE("oscillator error ratios " << e1 / e2 << ", " << e2 / e3);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.125));
    CHECK(e2 / e3 == doctest::Approx(16.0).epsilon(0.125));
}

TEST_CASE("zero data stays zero") {
    IntegratorConfig cfg;
    cfg.k = 0.01;
    cfg.T = 1.0;
    const auto r = integrate(scalar(3.0), {}, Vector::Zero(4), Vector::Zero(4), cfg);
    CHECK(r.state.w_curr.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stability boundary at k^2 rho = 12") {
    // Bounded means the envelope after 10^4 steps is no larger than in the first 100.
    const auto envelope = [](double k2rho, double& early, double& late) {
        IntegratorConfig cfg;
        cfg.k = std::sqrt(k2rho);
        cfg.T = cfg.k * 1e4;
        IntegrateOptions opts;
        early = late = 0.0;
        opts.observer = [&](const SimulationState& s) {
            double& slot = s.n <= 100 ? early : late;
            slot = std::max(slot, std::abs(s.w_curr[0]));
        };
        return integrate(scalar(1.0), {}, one(1.0), one(0.0), cfg, opts);
    };
    double early = 0.0, late = 0.0;
    const auto stable = envelope(11.8, early, late);
    CHECK(stable.steps == 10000);
    CHECK(late <= 1.001 * early);
    CHECK_THROWS_AS(envelope(12.2, early, late), InstabilityError);
}

TEST_CASE("forced oscillator with analytic data") {
    // w = sin(2t) + t^2 solves w_tt = -w + G with G = -3 sin(2t) + 2 + t^2.
    const auto G = [](double t) { return one(-3.0 * std::sin(2 * t) + 2.0 + t * t); };
    const auto Gt = [](double t) { return one(-6.0 * std::cos(2 * t) + 2.0 * t); };
    const auto Gtt = [](double t) { return one(12.0 * std::sin(2 * t) + 2.0); };
    const auto exact = [](double t) { return std::sin(2 * t) + t * t; };
    double prev = 0.0;
    for (double k : {0.02, 0.01}) {
        IntegratorConfig cfg;
        cfg.k = k;
        cfg.T = 2.0;
        const auto r = integrate(scalar(1.0), {G, Gt, Gtt}, one(0.0), one(2.0), cfg);
        const double err = std::abs(r.state.w_curr[0] - exact(2.0));
        if (prev > 0.0) {
            MESSAGE("forced error ratio " << prev / err);
            CHECK(prev / err == doctest::Approx(16.0).epsilon(0.125));
        }
        prev = err;
    }
}

TEST_CASE("homogeneous recurrence is time reversible") {
    const Applicator q = [](const Vector& w, Vector& out) {
        out.resize(2);
        out[0] = -4.0 * w[0] + w[1];
        out[1] = w[0] - 9.0 * w[1];
    };
    const Vector f1 = Vector::LinSpaced(2, 1.0, -0.5);
    IntegratorConfig cfg;
    cfg.k = 0.05;
    cfg.T = 5.0;
    const auto r = integrate(q, {}, f1, Vector::Zero(2), cfg);
    SimulationState back = r.state;
    std::swap(back.w_prev, back.w_curr);
    for (long n = r.steps; n > 1; --n) advance(q, {}, back, r.k);
    CHECK((back.w_curr - f1).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("energy trace") {
    const double omega = 3.0;
    IntegratorConfig cfg;
    cfg.k = 0.01;
    cfg.T = 1.0;
    IntegrateOptions opts;
    opts.energy = [omega](const Vector& w, const Vector& wt) {
        return wt.squaredNorm() + omega * omega * w.squaredNorm();
    };
    long observed = 0;
    opts.observer = [&](const SimulationState&) { ++observed; };
    const auto r = integrate(scalar(omega), {}, one(1.0), one(0.0), cfg, opts);
    CHECK(observed == r.steps);
    REQUIRE(r.energy_trace.size() == static_cast<std::size_t>(r.steps - 2));
    CHECK(r.energy_trace.front().E == doctest::Approx(9.0));
    CHECK(max_relative_drift(r.energy_trace) <= 1e-7);

    std::ostringstream out;
    write_energy_trace_csv(out, r.energy_trace);
    CHECK(out.str().rfind("t,E,relative_drift\n0,9,0\n", 0) == 0);
}

TEST_CASE("mismatched initial data") {
    IntegratorConfig cfg;
    cfg.k = 0.1;
    CHECK_THROWS_AS(integrate(scalar(1.0), {}, Vector::Zero(3), Vector::Zero(2), cfg), SizingError);
}
