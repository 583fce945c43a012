#include "ncwave/diagnostics.hpp"

#include "ncwave/errors.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace ncwave {

SpectralEstimate spectral_radius(const Applicator& q, Eigen::Index n, const PowerIterationOptions& options) {
    if (n <= 0) throw SizingError("diagnostics", "empty operator");
    const bool weighted = options.weights.size() > 0;
    if (weighted && options.weights.size() != n) throw SizingError("diagnostics", "weights do not match operator");
    const auto dot = [&](const Vector& a, const Vector& b) {
        return weighted ? a.dot(options.weights.cwiseProduct(b)) : a.dot(b);
    };

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = dist(rng);
    x /= std::sqrt(dot(x, x));

    Vector y(n);
    SpectralEstimate est;
    double previous = 0.0;
    for (long it = 1; it <= options.max_iterations; ++it) {
        q(x, y);
        const double lambda = dot(x, y);
        const double norm = std::sqrt(dot(y, y));
        est.iterations = it;
        est.eigenvalue = lambda;
        est.rho = std::abs(lambda);
        if (norm == 0.0) {
            est.last_change = 0.0;
            return est;
        }
        est.last_change = it > 1 ? std::abs(lambda - previous) / std::abs(lambda) : 1.0;
        if (it > 1 && est.last_change <= options.tol) return est;
        previous = lambda;
        x = y / norm;
    }
    std::ostringstream msg;
    msg << "power iteration did not converge in " << options.max_iterations << " iterations (estimate " << est.rho
        << ", last relative change " << est.last_change << ")";
    throw ConvergenceError(msg.str(), est.rho, est.last_change);
}

SpectralEstimate spectral_radius(const CoupledSystem& system, PowerIterationOptions options) {
    options.weights = system.weights();
    return spectral_radius([&system](const Vector& w, Vector& out) { system.apply_q(w, out); }, system.size(),
                           options);
}

double discrete_energy(const CoupledSystem& system, const Vector& w, const Vector& w_t) {
    return system.energy(w, w_t);
}

double hnorm_error(const Vector& w_num, const Vector& w_exact, const Vector& weights) {
    if (w_num.size() != w_exact.size() || w_num.size() != weights.size()) {
        throw SizingError("diagnostics", "error norm arguments differ in length");
    }
    const Vector d = w_num - w_exact;
    return std::sqrt(d.dot(weights.cwiseProduct(d)));
}

double convergence_rate(double e1, double e2, double m1, double m2) {
    return std::log(e1 / e2) / std::log(m1 / m2);
}

double PlaneWave::eval(double x, double y, double t, int dx, int dy, int dt) const {
    const double phase = a * x + b * y + omega * t;
    const double scale = amplitude * std::pow(a, dx) * std::pow(b, dy) * std::pow(omega, dt);
    switch ((dx + dy + dt) % 4) {
        case 0: return scale * std::cos(phase);
        case 1: return -scale * std::sin(phase);
        case 2: return -scale * std::cos(phase);
        default: return scale * std::sin(phase);
    }
}

AnalyticSolution::AnalyticSolution(double c1, double c2) : c1_(c1), c2_(c2) {
    if (!(c1 > 0.0) || !(c2 > 0.0) || !(c2 < std::sqrt(2.0) * c1)) {
        throw MisuseError("diagnostics", "analytic solution needs 0 < c2 < sqrt(2) c1");
    }
    k1_ = std::sqrt(2.0 * c1 * c1 / (c2 * c2) - 1.0);
    k2_ = (c1 * c1 - c2 * c2 * k1_) / (c1 * c1 + c2 * c2 * k1_);
    const double s = std::sqrt(2.0) * c1;
    u_ = {{1.0, 1.0, 1.0, -s}, {k2_, 1.0, -1.0, s}};
    v_ = {{1.0 + k2_, k1_, 1.0, -s}};
}

double AnalyticSolution::eval(const std::vector<PlaneWave>& waves, double x, double y, double t, int dx, int dy,
                              int dt) const {
    double sum = 0.0;
    for (const auto& w : waves) sum += w.eval(x, y, t, dx, dy, dt);
    return sum;
}

double AnalyticSolution::u(double x, double y, double t, int dx, int dy, int dt) const {
    return eval(u_, x, y, t, dx, dy, dt);
}

double AnalyticSolution::v(double x, double y, double t, int dx, int dy, int dt) const {
    return eval(v_, x, y, t, dx, dy, dt);
}

BoundaryValues AnalyticSolution::boundary(const BlockGrid& grid, bool left, double t, int dt) const {
    const auto& waves = left ? u_ : v_;
    BoundaryValues g = BoundaryValues::zeros(grid);
    for (int iy = 0; iy < grid.m_y; ++iy) {
        g.west[iy] = eval(waves, grid.x_min, grid.y(iy), t, 1, 0, dt);
        g.east[iy] = eval(waves, grid.x_max, grid.y(iy), t, 1, 0, dt);
    }
    for (int ix = 0; ix < grid.m_x; ++ix) {
        g.south[ix] = eval(waves, grid.x(ix), grid.y_min, t, 0, 1, dt);
        g.north[ix] = eval(waves, grid.x(ix), grid.y_max, t, 0, 1, dt);
    }
    return g;
}

Vector AnalyticSolution::sample(const CoupledSystem& system, double t, int dt) const {
    const Vector u = system.left().sample([&](double x, double y) { return this->u(x, y, t, 0, 0, dt); });
    const Vector v = system.right().sample([&](double x, double y) { return this->v(x, y, t, 0, 0, dt); });
    return system.join(u, v);
}

Forcing AnalyticSolution::forcing(const CoupledSystem& system) const {
    const auto make = [this, &system](int dt) {
        return [this, &system, dt](double t) {
            return system.inject(boundary(system.left().grid, true, t, dt),
                                 boundary(system.right().grid, false, t, dt));
        };
    };
    return {make(0), make(1), make(2)};
}

namespace {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& rows) {
    out << "method,order,interp,m,rho_tilde,log10_error,rate,seconds\n";
    for (const auto& r : rows) {
        out << r.method << ',' << r.order << ',' << r.interp << ',' << r.m << ',' << format_double(r.rho_tilde) << ','
            << format_double(r.log10_error) << ',' << format_double(r.rate) << ',' << format_double(r.seconds)
            << '\n';
    }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& in) {
    std::vector<ExperimentRecord> rows;
    std::string line;
    if (!std::getline(in, line)) return rows;
    const auto number = [](const std::string& s) {
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        return std::stod(s);
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 8) throw ConfigError("record row has " + std::to_string(f.size()) + " fields: " + line);
        ExperimentRecord r;
        r.method = f[0];
        r.order = std::stoi(f[1]);
        r.interp = f[2];
        r.m = std::stoi(f[3]);
        r.rho_tilde = number(f[4]);
        r.log10_error = number(f[5]);
        r.rate = number(f[6]);
        r.seconds = number(f[7]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace ncwave
