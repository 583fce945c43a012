#include "ncwave/sbp_operators.hpp"

#include "ncwave/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>

namespace ncwave {

namespace {

// Diagonal-norm second-derivative SBP operators (Mattsson & Nordström 2004).
// Closure blocks are given for the left end; the right end is the
// point reflection.

struct Closure {
    std::span<const double> norm;       // leading H entries (unit spacing)
    std::span<const double> block;      // rows x cols, row-major
    int cols = 0;
    std::span<const double> interior;   // symmetric stencil, length 2w+1
    std::span<const double> derivative; // d_l at unit spacing
};

constexpr std::array<double, 4> kNorm4{17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0};
constexpr std::array<double, 24> kBlock4{
    2.0,           -5.0,          4.0,            -1.0,          0.0,          0.0,
    1.0,           -2.0,          1.0,            0.0,           0.0,          0.0,
    -4.0 / 43.0,   59.0 / 43.0,   -110.0 / 43.0,  59.0 / 43.0,   -4.0 / 43.0,  0.0,
    -1.0 / 49.0,   0.0,           59.0 / 49.0,    -118.0 / 49.0, 64.0 / 49.0,  -4.0 / 49.0,
};
constexpr std::array<double, 5> kInterior4{-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0};
constexpr std::array<double, 4> kDerivative4{-11.0 / 6.0, 3.0, -3.0 / 2.0, 1.0 / 3.0};

constexpr std::array<double, 6> kNorm6{13649.0 / 43200.0, 12013.0 / 8640.0, 2711.0 / 4320.0,
                                       5359.0 / 4320.0,   7877.0 / 8640.0,  43801.0 / 43200.0};
constexpr std::array<double, 54> kBlock6{
    114170.0 / 40947.0, -438107.0 / 54596.0, 336409.0 / 40947.0, -276997.0 / 81894.0,
    3747.0 / 13649.0,   21035.0 / 163788.0,  0.0,                0.0,
    0.0,
    6173.0 / 5860.0,    -2066.0 / 879.0,     3283.0 / 1758.0,    -303.0 / 293.0,
    2111.0 / 3516.0,    -601.0 / 4395.0,     0.0,                0.0,
    0.0,
    -52391.0 / 81330.0, 134603.0 / 32532.0,  -21982.0 / 2711.0,  112915.0 / 16266.0,
    -46969.0 / 16266.0, 30409.0 / 54220.0,   0.0,                0.0,
    0.0,
    68603.0 / 321540.0, -12423.0 / 10718.0,  112915.0 / 32154.0, -75934.0 / 16077.0,
    53369.0 / 21436.0,  -54899.0 / 160770.0, 48.0 / 5359.0,      0.0,
    0.0,
    -7053.0 / 39385.0,  86551.0 / 94524.0,   -46969.0 / 23631.0, 53369.0 / 15754.0,
    -87904.0 / 23631.0, 820271.0 / 472620.0, -1296.0 / 7877.0,   96.0 / 7877.0,
    0.0,
    21035.0 / 525612.0, -24641.0 / 131403.0, 30409.0 / 87602.0,  -54899.0 / 131403.0,
    820271.0 / 525612.0, -117600.0 / 43801.0, 64800.0 / 43801.0, -6480.0 / 43801.0,
    480.0 / 43801.0,
};
constexpr std::array<double, 7> kInterior6{1.0 / 90.0,  -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0,
                                           3.0 / 2.0,   -3.0 / 20.0, 1.0 / 90.0};
constexpr std::array<double, 5> kDerivative6{-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -1.0 / 4.0};

Closure closure_for(int order) {
    switch (order) {
        case 4: return {kNorm4, kBlock4, 6, kInterior4, kDerivative4};
        case 6: return {kNorm6, kBlock6, 9, kInterior6, kDerivative6};
        default:
            throw UnsupportedOperatorError("sbp_operators",
                                           "no SBP D2 operator of order " + std::to_string(order));
    }
}

// Largest q such that f maps x^k to the expected image for every k <= q.
template <typename Exact>
int exactness_degree(int max_degree, Exact&& exact) {
    int degree = -1;
    for (int q = 0; q <= max_degree; ++q) {
        if (!exact(q)) break;
        degree = q;
    }
    return degree;
}

}  // namespace

bool is_supported_order(int order) { return order == 4 || order == 6; }

int closure_rows(int order) { return static_cast<int>(closure_for(order).norm.size()); }

int min_points(int order) { return 2 * closure_rows(order) + 1; }

SbpOperator1D build_sbp_d2(int order, int m, double h) {
    const Closure c = closure_for(order);
    const int nb = static_cast<int>(c.norm.size());
    if (m < min_points(order)) {
        throw SizingError("sbp_operators", "order " + std::to_string(order) + " needs at least " +
                                               std::to_string(min_points(order)) + " points, got " +
                                               std::to_string(m));
    }
    if (!(h > 0.0)) throw SizingError("sbp_operators", "grid spacing must be positive");

    const double ih2 = 1.0 / (h * h);
    const int w = static_cast<int>(c.interior.size()) / 2;

    SbpOperator1D op;
    op.order = order;
    op.m = m;
    op.h = h;

    std::vector<Triplet> d2;
    d2.reserve(static_cast<std::size_t>(m) * c.interior.size());
    for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < c.cols; ++j) {
            const double v = c.block[static_cast<std::size_t>(i * c.cols + j)];
            if (v == 0.0) continue;
            d2.emplace_back(i, j, v * ih2);
            d2.emplace_back(m - 1 - i, m - 1 - j, v * ih2);
        }
    }
    for (int i = nb; i < m - nb; ++i) {
        for (int k = -w; k <= w; ++k) d2.emplace_back(i, i + k, c.interior[static_cast<std::size_t>(k + w)] * ih2);
    }
    op.D2.resize(m, m);
    op.D2.setFromTriplets(d2.begin(), d2.end());

    op.H = Vector::Constant(m, h);
    for (int i = 0; i < nb; ++i) {
        op.H[i] = c.norm[static_cast<std::size_t>(i)] * h;
        op.H[m - 1 - i] = c.norm[static_cast<std::size_t>(i)] * h;
    }

    op.e_l = Vector::Zero(m);
    op.e_r = Vector::Zero(m);
    op.e_l[0] = 1.0;
    op.e_r[m - 1] = 1.0;
    op.d_l = Vector::Zero(m);
    op.d_r = Vector::Zero(m);
    for (std::size_t k = 0; k < c.derivative.size(); ++k) {
        op.d_l[static_cast<Eigen::Index>(k)] = c.derivative[k] / h;
        op.d_r[m - 1 - static_cast<Eigen::Index>(k)] = -c.derivative[k] / h;
    }

    // M = -H D2 + e_r d_r^T - e_l d_l^T
    std::vector<Triplet> mt;
    mt.reserve(d2.size() + 2 * c.derivative.size());
    for (const auto& t : d2) mt.emplace_back(t.row(), t.col(), -op.H[t.row()] * t.value());
    for (std::size_t k = 0; k < c.derivative.size(); ++k) {
        const auto kk = static_cast<int>(k);
        mt.emplace_back(0, kk, -op.d_l[kk]);
        mt.emplace_back(m - 1, m - 1 - kk, op.d_r[m - 1 - kk]);
    }
    op.M.resize(m, m);
    op.M.setFromTriplets(mt.begin(), mt.end());
    op.M.prune(0.0);
    return op;
}

DenseMatrix to_dense(const SparseMatrix& a) { return DenseMatrix(a); }

std::vector<std::string> CertificationReport::failures() const {
    std::vector<std::string> out;
    if (!h_positive) out.emplace_back("H has a non-positive entry");
    if (!m_symmetric) out.emplace_back("M is not symmetric");
    if (!m_psd) out.emplace_back("M is not positive semi-definite");
    if (!identity_ok) out.emplace_back("SBP identity residual above tolerance");
    return out;
}

CertificationReport certify_sbp(const SbpOperator1D& op, int dense_limit) {
    CertificationReport r;
    const int m = op.m;
    const double h = op.h;

    r.h_min = op.H.minCoeff();
    r.h_positive = r.h_min > 0.0;

    const DenseMatrix D2 = to_dense(op.D2);
    const DenseMatrix M = to_dense(op.M);
    const DenseMatrix boundary = op.e_r * op.d_r.transpose() - op.e_l * op.d_l.transpose();
    const DenseMatrix lhs = op.H.asDiagonal() * D2;
    // Entries of H D2 scale like 1/h; report the residual at unit spacing.
    r.sbp_residual = (lhs - (-M + boundary)).cwiseAbs().maxCoeff() * h;
    r.identity_ok = r.sbp_residual <= 1e-12;

    r.m_norm = M.cwiseAbs().rowwise().sum().maxCoeff();
    r.m_symmetry_defect = (M - M.transpose()).cwiseAbs().maxCoeff();
    r.m_symmetric = r.m_symmetry_defect <= 1e-12 * std::max(r.m_norm, 1.0);

    if (m <= dense_limit) {
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
        r.m_min_eigenvalue = es.eigenvalues().minCoeff();
        const double eps = std::numeric_limits<double>::epsilon();
        r.m_psd = r.m_min_eigenvalue >= -64.0 * eps * std::max(r.m_norm, 1.0);
    } else {
        r.m_min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
        r.m_psd = true;
    }

    // Exactness on samples centred on the grid, in units of h, so powers stay
    // moderate. A row is exact for degree q when its error is at roundoff level
    // relative to the size of the monomial samples.
    const int nb = closure_rows(op.order);
    Vector x(m);
    for (int i = 0; i < m; ++i) x[i] = (i - 0.5 * (m - 1)) * h;
    auto rows_exact = [&](int first, int last, int q) {
        Vector f = x.array().pow(q);
        Vector expect = (q >= 2) ? Vector(q * (q - 1) * x.array().pow(q - 2)) : Vector(Vector::Zero(m));
        Vector got = D2 * f;
        const double scale = f.cwiseAbs().maxCoeff() / (h * h);
        for (int i = first; i < last; ++i) {
            if (std::abs(got[i] - expect[i]) > 1e-9 * std::max(scale, 1.0)) return false;
        }
        return true;
    };
    const int max_degree = 2 * op.order;
    r.interior_degree = exactness_degree(max_degree, [&](int q) {
        return rows_exact(nb, m - nb, q);
    });
    r.closure_degree = exactness_degree(max_degree, [&](int q) {
        return rows_exact(0, nb, q) && rows_exact(m - nb, m, q);
    });
    r.derivative_degree = exactness_degree(max_degree, [&](int q) {
        Vector f = x.array().pow(q);
        const double dl = (q >= 1) ? q * std::pow(x[0], q - 1) : 0.0;
        const double dr = (q >= 1) ? q * std::pow(x[m - 1], q - 1) : 0.0;
        const double scale = f.cwiseAbs().maxCoeff() / h;
        return std::abs(op.d_l.dot(f) - dl) <= 1e-9 * std::max(scale, 1.0) &&
               std::abs(op.d_r.dot(f) - dr) <= 1e-9 * std::max(scale, 1.0);
    });
    return r;
}

}  // namespace ncwave
