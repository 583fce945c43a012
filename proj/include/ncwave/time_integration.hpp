#pragma once

#include "ncwave/sbp_operators.hpp"

#include <functional>
#include <iosfwd>
#include <vector>

namespace ncwave {

/// out = Q w for a fixed linear operator Q.
using Applicator = std::function<void(const Vector&, Vector&)>;

/// Time-dependent forcing G(t) and its first two time derivatives. Empty
/// functions mean zero forcing.
struct Forcing {
    std::function<Vector(double)> G;
    std::function<Vector(double)> G_t;
    std::function<Vector(double)> G_tt;

    bool empty() const { return !G; }
};

struct IntegratorConfig {
    double k = 0.0;        ///< requested step; shortened so that T is hit exactly
    double T = 2.0;
    double safety = 0.1;   ///< fraction of the stable step, when k is derived
    double growth_limit = 1e6;
};

struct SimulationState {
    Vector w_prev;  ///< w at t_{n-1}
    Vector w_curr;  ///< w at t_n
    long n = 0;
    double t = 0.0;
};

/// E(w, w_t) evaluated along the trajectory.
using EnergyFunctional = std::function<double(const Vector& w, const Vector& w_t)>;

struct EnergySample {
    double t;
    double E;
    double relative_drift;  ///< (E - E_0) / E_0, or E - E_0 when E_0 == 0
};

struct IntegrateOptions {
    /// Called after every step with the new state.
    std::function<void(const SimulationState&)> observer;
    /// When set, the energy is recorded at t = 0 (exact f2) and at every
    /// t_n with two neighbours on each side, using the five-point centred
    /// velocity (-w^{n+2} + 8 w^{n+1} - 8 w^{n-1} + w^{n-2}) / (12 k).
    EnergyFunctional energy;
};

struct IntegrationResult {
    SimulationState state;
    double k = 0.0;
    long steps = 0;
    std::vector<EnergySample> energy_trace;
};

/// k_max = sqrt(12 / rho_tilde) h.
double max_stable_step(double rho_tilde, double h);

/// Number of steps of size <= k that reach T exactly.
long steps_to(double T, double k);

/// Two-step scheme
///
///     w^1     = f1 + k f2 + k^2/2 a + k^3/6 (Q f2 + G_t(0)) + k^4/24 (Q a + G_tt(0)),  a = Q f1 + G(0)
///     w^{n+1} = 2 w^n - w^{n-1} + k^2 r + k^4/12 (Q r + G_tt(t_n)),  r = Q w^n + G(t_n)
///
/// which is fourth-order accurate for w_tt = Q w + G and stable for k^2 rho(Q) < 12.
/// Throws InstabilityError when ||w|| exceeds growth_limit times the
/// reference norm max(||f1||, ||w^1||).
IntegrationResult integrate(const Applicator& q, const Forcing& forcing, const Vector& f1, const Vector& f2,
                            const IntegratorConfig& config, const IntegrateOptions& options = {});

/// One step of the recurrence: (w_prev, w_curr) at t_n -> (w_curr, w_next),
/// n and t advance by one step. Running it on a state with w_prev and w_curr
/// swapped steps backwards in time.
void advance(const Applicator& q, const Forcing& forcing, SimulationState& state, double k);

double max_relative_drift(const std::vector<EnergySample>& trace);

/// Columns t,E,relative_drift.
void write_energy_trace_csv(std::ostream& out, const std::vector<EnergySample>& trace);

}  // namespace ncwave
