#include "ncwave/time_integration.hpp"

#include "ncwave/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

namespace ncwave {

double max_stable_step(double rho_tilde, double h) {
    if (!(rho_tilde > 0.0)) throw MisuseError("time_integration", "scaled spectral radius must be positive");
    return std::sqrt(12.0 / rho_tilde) * h;
}

long steps_to(double T, double k) {
    if (!(k > 0.0) || !(T >= 0.0)) throw MisuseError("time_integration", "need k > 0 and T >= 0");
    return static_cast<long>(std::ceil(T / k - 1e-9));
}

namespace {

// Holds the last five states for the centred velocity.
class EnergyRecorder {
public:
    EnergyRecorder(const EnergyFunctional& energy, double k, std::vector<EnergySample>& trace)
        : energy_(energy), k_(k), trace_(trace) {}

    void start(const Vector& f1, const Vector& f2) {
        e0_ = energy_(f1, f2);
        trace_.push_back({0.0, e0_, 0.0});
    }

    // w is the state at step n.
    void push(const Vector& w, long n) {
        window_[static_cast<std::size_t>(n % 5)] = w;
        if (n < 4) return;
        const auto at = [&](long j) -> const Vector& { return window_[static_cast<std::size_t>(j % 5)]; };
        const long mid = n - 2;
        const Vector vel = (at(mid - 2) - at(n) + 8.0 * (at(mid + 1) - at(mid - 1))) / (12.0 * k_);
        const double e = energy_(at(mid), vel);
        const double drift = e0_ != 0.0 ? (e - e0_) / e0_ : e - e0_;
        trace_.push_back({static_cast<double>(mid) * k_, e, drift});
    }

private:
    const EnergyFunctional& energy_;
    double k_;
    std::vector<EnergySample>& trace_;
    std::array<Vector, 5> window_;
    double e0_ = 0.0;
};

}  // namespace

IntegrationResult integrate(const Applicator& q, const Forcing& forcing, const Vector& f1, const Vector& f2,
                            const IntegratorConfig& config, const IntegrateOptions& options) {
    if (f1.size() != f2.size()) throw SizingError("time_integration", "f1 and f2 differ in length");
    const long steps = steps_to(config.T, config.k);
    IntegrationResult result;
    result.steps = steps;
    const double k = steps > 0 ? config.T / static_cast<double>(steps) : config.k;
    result.k = k;

    SimulationState& s = result.state;
    s.w_prev = f1;
    s.w_curr = f1;
    if (steps == 0) return result;

    std::optional<EnergyRecorder> recorder;
    if (options.energy) {
        recorder.emplace(options.energy, k, result.energy_trace);
        recorder->start(f1, f2);
        recorder->push(f1, 0);
    }

    const double k2 = k * k;
    Vector qw(f1.size());

    // Startup step from the Taylor expansion about t = 0, through k^4 w_tttt / 24.
    Vector wtt(f1.size()), w4(f1.size());
    q(f1, wtt);
    if (!forcing.empty()) wtt += forcing.G(0.0);
    q(wtt, w4);
    if (forcing.G_tt) w4 += forcing.G_tt(0.0);
    q(f2, qw);
    Vector w1 = f1 + k * f2 + 0.5 * k2 * wtt + (k2 * k / 6.0) * qw + (k2 * k2 / 24.0) * w4;
    if (forcing.G_t) w1 += (k2 * k / 6.0) * forcing.G_t(0.0);
    s.w_curr = std::move(w1);
    s.n = 1;
    s.t = k;

    double reference = std::max(f1.norm(), s.w_curr.norm());
    const auto check = [&](const Vector& w, long n) {
        const double norm = w.norm();
        if (!std::isfinite(norm)) {
            throw InstabilityError("state became non-finite at step " + std::to_string(n), n,
                                   std::numeric_limits<double>::infinity());
        }
        if (reference == 0.0) {
            reference = norm;
            return;
        }
        const double growth = norm / reference;
        if (growth > config.growth_limit) {
            throw InstabilityError("norm grew by " + std::to_string(growth) + " at step " + std::to_string(n), n,
                                   growth);
        }
    };
    check(s.w_curr, 1);
    if (recorder) recorder->push(s.w_curr, 1);
    if (options.observer) options.observer(s);

    for (long n = 1; n < steps; ++n) {
        s.t = static_cast<double>(n) * k;
        advance(q, forcing, s, k);
        s.t = static_cast<double>(n + 1) * k;
        check(s.w_curr, s.n);
        if (recorder) recorder->push(s.w_curr, s.n);
        if (options.observer) options.observer(s);
    }
    s.t = config.T;
    return result;
}

void advance(const Applicator& q, const Forcing& forcing, SimulationState& s, double k) {
    const double k2 = k * k;
    const double k4 = k2 * k2;
    Vector r, qr;
    q(s.w_curr, r);
    if (!forcing.empty()) r += forcing.G(s.t);
    q(r, qr);
    if (forcing.G_tt) qr += forcing.G_tt(s.t);
    // w^{n+1} overwrites w^{n-1}.
    s.w_prev = 2.0 * s.w_curr - s.w_prev + k2 * r + (k4 / 12.0) * qr;
    s.w_prev.swap(s.w_curr);
    s.n += 1;
    s.t += k;
}

double max_relative_drift(const std::vector<EnergySample>& trace) {
    double d = 0.0;
    for (const auto& e : trace) d = std::max(d, std::abs(e.relative_drift));
    return d;
}

void write_energy_trace_csv(std::ostream& out, const std::vector<EnergySample>& trace) {
    out << "t,E,relative_drift\n";
    const auto old = out.precision(17);
    for (const auto& e : trace) out << e.t << ',' << e.E << ',' << e.relative_drift << '\n';
    out.precision(old);
}

}  // namespace ncwave
