#pragma once

#include "ncwave/config.hpp"
#include "ncwave/diagnostics.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ncwave {

/// One compared quantity. Soft checks are reported but do not count as a
/// tolerance breach.
struct Check {
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;  ///< absolute
    bool passed = false;
    bool soft = false;
};

Check make_check(std::string name, double value, double expected, double tolerance, bool soft = false);
bool all_hard_checks_pass(const std::vector<Check>& checks);
void write_checks(std::ostream& out, const std::vector<Check>& checks);

/// Left block [x_min, x_interface] x [y_min, y_max] with m x m points and
/// speed c1; right block [x_interface, x_max] x ... with (2m-1)^2 points and c2.
BlockGrid left_grid(const ExperimentConfig& config, int m);
BlockGrid right_grid(const ExperimentConfig& config, int m);

CoupledSystem build_experiment_system(const ExperimentConfig& config, int m, int order, CouplingMethod method,
                                      InterpolationKind kind);

/// h_L^2 rho for a coupled system.
double coupled_rho_tilde(const CoupledSystem& system, const PowerIterationOptions& options);

/// h^2 rho for the left block alone with the Neumann SAT on all four sides.
double single_block_rho_tilde(const ExperimentConfig& config, int m, int order, const PowerIterationOptions& options);

/// Reference values of the scaled spectral radius, independent of method.
double reference_rho_tilde(int order);

struct ReferenceError {
    double log10_error;
    double rate;  ///< NaN for the coarsest m
};

/// Published error/rate for (method, order, kind, m), if tabulated.
std::optional<ReferenceError> reference_error(CouplingMethod method, int order, InterpolationKind kind, int m);

struct ManufacturedRun {
    double error = 0.0;
    double k = 0.0;
    long steps = 0;
    double seconds = 0.0;
};

/// Integrates the manufactured solution to config.T with
/// k = safety sqrt(12/rho_tilde) h_L and returns the Ĥ-error at T.
ManufacturedRun run_manufactured(const CoupledSystem& system, const ExperimentConfig& config, double rho_tilde,
                                 double safety);

struct ExperimentResult {
    std::vector<ExperimentRecord> rows;
    std::vector<Check> checks;
};

/// Progress messages go to `log` when non-null.
ExperimentResult run_spectrum(const ExperimentConfig& config, std::ostream* log = nullptr);
ExperimentResult run_convergence(const ExperimentConfig& config, std::ostream* log = nullptr);

struct SimulateResult {
    std::vector<std::string> files;
    std::vector<EnergySample> energy_trace;
    double max_drift = 0.0;
    double final_error = std::numeric_limits<double>::quiet_NaN();  ///< manufactured data only
    std::vector<Check> checks;
};

/// Writes snapshot_<t>.csv files and energy.csv into out_dir.
SimulateResult run_simulate(const ExperimentConfig& config, const std::string& out_dir, std::ostream* log = nullptr);

struct PropertyResult {
    std::string property;
    std::string subject;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// Certification of all shipped operators plus the projection identities.
std::vector<PropertyResult> run_verify(const ExperimentConfig& config, std::ostream* log = nullptr);
void write_properties_csv(std::ostream& out, const std::vector<PropertyResult>& rows);

}  // namespace ncwave
