#pragma once

#include "ncwave/coupling.hpp"
#include "ncwave/interpolation.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ncwave {

enum class Profile { quick, full };

std::string_view to_string(Profile profile);
Profile parse_profile(std::string_view text);

enum class InitialCondition { gaussian, manufactured, zero };

std::string_view to_string(InitialCondition ic);
InitialCondition parse_initial_condition(std::string_view text);

/// Everything an experiment needs. Text form is flat key = value lines under
/// [section] headers; '#' starts a comment.
struct ExperimentConfig {
    // [geometry]
    double x_min = -10.0;
    double x_interface = 0.0;
    double x_max = 10.0;
    double y_min = 0.0;
    double y_max = 10.0;
    // [physics]
    double c1 = 1.0;
    double c2 = 0.5;
    // [sweep]
    std::vector<int> m_list{26, 51, 101, 201, 401, 801};
    std::vector<int> orders{4, 6};
    std::vector<CouplingMethod> methods{CouplingMethod::projection, CouplingMethod::hybrid};
    std::vector<InterpolationKind> interpolations{InterpolationKind::traditional, InterpolationKind::order_preserving};
    Orientation orientation = Orientation::standard;
    bool op_substitution = true;
    // [spectrum]
    std::vector<int> spectrum_m{101};
    double power_tol = 1e-7;
    // [time]
    double T = 2.0;
    double safety = 0.1;
    int calibration_m = 51;  ///< resolution at which rho_tilde is measured to set k
    // [simulate]
    InitialCondition initial = InitialCondition::gaussian;
    int simulate_m = 51;
    int simulate_order = 4;
    CouplingMethod simulate_method = CouplingMethod::projection;
    InterpolationKind simulate_interpolation = InterpolationKind::order_preserving;
    double simulate_safety = 0.1;
    std::vector<double> snapshot_times{0.0, 1.0, 2.0};
    double pulse_x = -5.0;
    double pulse_y = 5.0;
    double pulse_width = 1.0;
    // [verify]
    double perturb_interpolation = 0.0;  ///< added to one closure coefficient; negative control
    // [run]
    std::string out = "results";
    Profile profile = Profile::quick;
    std::uint64_t seed = 12345;
    bool timing = true;  ///< false writes seconds = 0 for byte-stable output

    /// m list after the profile filter: quick drops m > 401.
    std::vector<int> active_m() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
void write_config(std::ostream& out, const ExperimentConfig& config);
std::string to_text(const ExperimentConfig& config);

}  // namespace ncwave
