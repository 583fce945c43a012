#pragma once

#include "ncwave/coupling.hpp"
#include "ncwave/time_integration.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace ncwave {

struct PowerIterationOptions {
    double tol = 1e-7;             ///< relative change of the Rayleigh quotient
    std::uint64_t seed = 12345;
    long max_iterations = 100000;
    Vector weights;                ///< inner product for the Rayleigh quotient; empty = Euclidean
};

struct SpectralEstimate {
    double rho = 0.0;
    double eigenvalue = 0.0;  ///< signed dominant eigenvalue
    long iterations = 0;
    double last_change = 0.0;
};

/// Power iteration on Q from a seeded random start. Throws ConvergenceError
/// when the cap is reached.
SpectralEstimate spectral_radius(const Applicator& q, Eigen::Index n, const PowerIterationOptions& options = {});

/// Uses the system's Ĥ as the inner product.
SpectralEstimate spectral_radius(const CoupledSystem& system, PowerIterationOptions options = {});

inline double scaled_spectral_radius(double rho, double h) { return h * h * rho; }

/// Energy of the coupled state; w_t is the velocity estimate.
double discrete_energy(const CoupledSystem& system, const Vector& w, const Vector& w_t);

/// sqrt((d, W d)), d = w_num - w_exact.
double hnorm_error(const Vector& w_num, const Vector& w_exact, const Vector& weights);

/// log(e1/e2) / log(m1/m2); negative for a converging sequence.
double convergence_rate(double e1, double e2, double m1, double m2);

/// A cos(a x + b y + omega t).
struct PlaneWave {
    double amplitude, a, b, omega;

    /// Mixed derivative of order (dx, dy, dt).
    double eval(double x, double y, double t, int dx = 0, int dy = 0, int dt = 0) const;
};

/// Exact two-block solution for the interface at x = 0 with u on the left
/// (speed c1) and v on the right (speed c2):
///
///     u = cos(x + y - s t) + k2 cos(x - y + s t)
///     v = (1 + k2) cos(k1 x + y - s t),     s = sqrt(2) c1
///
/// with k1 = sqrt(2 c1^2/c2^2 - 1), k2 = (c1^2 - c2^2 k1)/(c1^2 + c2^2 k1).
/// Requires c2 < sqrt(2) c1.
class AnalyticSolution {
public:
    AnalyticSolution(double c1, double c2);

    double c1() const { return c1_; }
    double c2() const { return c2_; }
    double k1() const { return k1_; }
    double k2() const { return k2_; }

    double u(double x, double y, double t, int dx = 0, int dy = 0, int dt = 0) const;
    double v(double x, double y, double t, int dx = 0, int dy = 0, int dt = 0) const;

    /// Boundary values (u_x on west/east, u_y on south/north) for the given
    /// block, differentiated dt times in time.
    BoundaryValues boundary(const BlockGrid& grid, bool left, double t, int dt = 0) const;

    /// Samples [u; v] (or their time derivatives) on both blocks.
    Vector sample(const CoupledSystem& system, double t, int dt = 0) const;

    /// G, G_t, G_tt for the coupled system.
    Forcing forcing(const CoupledSystem& system) const;

private:
    double eval(const std::vector<PlaneWave>& waves, double x, double y, double t, int dx, int dy, int dt) const;

    double c1_, c2_, k1_, k2_;
    std::vector<PlaneWave> u_, v_;
};

/// One row of a spectrum or convergence table.
struct ExperimentRecord {
    std::string method;
    int order = 0;
    std::string interp;
    int m = 0;
    double rho_tilde = std::numeric_limits<double>::quiet_NaN();
    double log10_error = std::numeric_limits<double>::quiet_NaN();
    double rate = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0.0;
};

/// Header method,order,interp,m,rho_tilde,log10_error,rate,seconds. Missing
/// values are written as "nan"; doubles use 17 significant digits.
void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& rows);
std::vector<ExperimentRecord> read_records_csv(std::istream& in);

}  // namespace ncwave
