#include "ncwave/interpolation.hpp"

#include "ncwave/errors.hpp"

#include <algorithm>
#include <span>
#include <array>
#include <cmath>
#include <map>
#include <string>

namespace ncwave {

// The interior of I_c2f copies coincident points and fills the midpoints with
// the symmetric 2p-point Lagrange stencil; I_f2c follows from norm
// compatibility. Near each end an nf x nc block of I_c2f is free. It is fixed
// by requiring polynomial exactness of both members up to the closure degrees
// (hard constraints) and, with the remaining freedom, minimising the residual
// of the next degree (soft constraints).
//
// With plain injection on coincident points the closure degrees cannot sum to
// more than 2p - 2. The 4th order pairs reach 3 by adding a multiple of the
// fourth difference to the coincident rows, which keeps them exact for cubics:
// -1/128 for c2f degree 2 with f2c degree 1, +7/128 for the reverse.

namespace {

constexpr std::array<double, 4> kMidpoint4{-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0};
constexpr std::array<double, 6> kMidpoint6{3.0 / 256.0,   -25.0 / 256.0, 150.0 / 256.0,
                                           150.0 / 256.0, -25.0 / 256.0, 3.0 / 256.0};

struct Design {
    int fine_rows;     // nf
    int coarse_cols;   // nc
    int hard_c2f;      // exact degree of I_c2f at the closure
    int hard_f2c;
    int soft_c2f;      // degree whose residual is minimised
    int soft_f2c;
    double weight_c2f;
    double weight_f2c;
    double smoothing = 0.0;  // fourth-difference weight on coincident rows
};

Design design_for(int order, InterpolationKind kind, GoodMember good) {
    const int p = order / 2;
    const int nf = order == 4 ? 7 : 11;
    const int nc = order == 4 ? 5 : 7;
    if (kind == InterpolationKind::traditional) {
        const double w_c2f = order == 4 ? 1.0 : 0.1;
        return {nf, nc, p - 1, p - 1, p, p, w_c2f, 1.0};
    }
    // The bad member's missing degree is what limits accuracy, so its residual
    // dominates the objective.
    if (order == 4) {
        if (good == GoodMember::fine_to_coarse) return {nf, nc, 1, 2, 2, 3, 1.0, 0.1, 7.0 / 128.0};
        return {nf, nc, 2, 1, 3, 2, 0.1, 1.0, -1.0 / 128.0};
    }
    if (good == GoodMember::fine_to_coarse) return {nf, nc, p - 2, p, p - 1, p + 1, 1.0, 0.1};
    return {nf, nc, p, p - 2, p + 1, p - 1, 0.1, 1.0};
}

std::span<const double> midpoint_stencil(int order) {
    if (order == 4) return kMidpoint4;
    return kMidpoint6;
}

Vector unit_norm(int order, int m) {
    return build_sbp_d2(order, m, 1.0).H;
}

// Rows of the coarse-to-fine operator away from the closures. Midpoint rows
// whose stencil would leave the grid are left empty.
std::vector<Triplet> interior_rows(int order, int mc, double smoothing) {
    constexpr std::array<double, 5> delta4{1.0, -4.0, 6.0, -4.0, 1.0};
    const auto st = midpoint_stencil(order);
    const int half = static_cast<int>(st.size()) / 2;
    const int mf = 2 * mc - 1;
    std::vector<Triplet> t;
    for (int f = 0; f < mf; ++f) {
        if (f % 2 == 0) {
            const int j = f / 2;
            if (smoothing == 0.0 || j < 2 || j + 2 >= mc) {
                t.emplace_back(f, j, 1.0);
                continue;
            }
            for (int k = 0; k < 5; ++k) t.emplace_back(f, j - 2 + k, (k == 2 ? 1.0 : 0.0) + smoothing * delta4[k]);
            continue;
        }
        const int j0 = (f - 1) / 2 - (half - 1);
        if (j0 < 0 || j0 + static_cast<int>(st.size()) > mc) continue;
        for (std::size_t k = 0; k < st.size(); ++k) t.emplace_back(f, j0 + static_cast<int>(k), st[k]);
    }
    return t;
}

int restriction_rows(int order, const Design& d) {
    return d.coarse_cols + static_cast<int>(midpoint_stencil(order).size()) / 2 + 2;
}

// Solves for the left closure on a grid long enough that the right end does
// not enter the equations. Returns the full left rows 0..nf-1 of I_c2f as a
// dense block over the local coarse grid.
DenseMatrix solve_left_closure(int order, const Design& d) {
    const int nR = restriction_rows(order, d);
    const int mc = 2 * (nR + d.coarse_cols) + 8;
    const int mf = 2 * mc - 1;
    const int nf = d.fine_rows;
    const int nc = d.coarse_cols;
    const Vector wc = unit_norm(order, mc);
    const Vector wf = unit_norm(order, mf) * 0.5;

    DenseMatrix P = DenseMatrix::Zero(mf, mc);
    for (const auto& t : interior_rows(order, mc, d.smoothing)) P(t.row(), t.col()) = t.value();
    P.topLeftCorner(nf, nc).setZero();
    auto unknown = [nc](int f, int j) { return f * nc + j; };
    const int n = nf * nc;

    Vector xc(mc), xf(mf);
    for (int j = 0; j < mc; ++j) xc[j] = j;
    for (int f = 0; f < mf; ++f) xf[f] = 0.5 * f;

    // Exactness of I_c2f rows f < nf for degree q.
    auto c2f_equations = [&](int q, std::vector<Vector>& rows, std::vector<double>& rhs) {
        const Vector xq = xc.array().pow(q);
        for (int f = 0; f < nf; ++f) {
            Vector a = Vector::Zero(n);
            for (int j = 0; j < nc; ++j) a[unknown(f, j)] = xq[j];
            double known = 0.0;
            for (int j = nc; j < mc; ++j) known += P(f, j) * xq[j];
            rows.push_back(std::move(a));
            rhs.push_back(std::pow(xf[f], q) - known);
        }
    };
    // Exactness of I_f2c = H_c^{-1} I_c2f^T H_f rows i < nR for degree q.
    auto f2c_equations = [&](int q, std::vector<Vector>& rows, std::vector<double>& rhs) {
        const Vector xq = xf.array().pow(q);
        for (int i = 0; i < nR; ++i) {
            Vector a = Vector::Zero(n);
            double known = 0.0;
            for (int f = 0; f < mf; ++f) {
                const double c = wf[f] / wc[i] * xq[f];
                if (f < nf && i < nc) {
                    a[unknown(f, i)] += c;
                } else {
                    known += c * P(f, i);
                }
            }
            rows.push_back(std::move(a));
            rhs.push_back(std::pow(xc[i], q) - known);
        }
    };
    auto stack = [n](const std::vector<Vector>& rows, const std::vector<double>& rhs,
                     DenseMatrix& A, Vector& b) {
        A.resize(static_cast<Eigen::Index>(rows.size()), n);
        b.resize(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            A.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
            b[static_cast<Eigen::Index>(r)] = rhs[r];
        }
    };

    std::vector<Vector> hard_rows, soft_rows;
    std::vector<double> hard_rhs, soft_rhs;
    for (int q = 0; q <= d.hard_c2f; ++q) c2f_equations(q, hard_rows, hard_rhs);
    for (int q = 0; q <= d.hard_f2c; ++q) f2c_equations(q, hard_rows, hard_rhs);
    for (int q = d.hard_c2f + 1; q <= d.soft_c2f; ++q) {
        const auto first = soft_rows.size();
        c2f_equations(q, soft_rows, soft_rhs);
        for (auto r = first; r < soft_rows.size(); ++r) {
            soft_rows[r] *= d.weight_c2f;
            soft_rhs[r] *= d.weight_c2f;
        }
    }
    for (int q = d.hard_f2c + 1; q <= d.soft_f2c; ++q) {
        const auto first = soft_rows.size();
        f2c_equations(q, soft_rows, soft_rhs);
        for (auto r = first; r < soft_rows.size(); ++r) {
            soft_rows[r] *= d.weight_f2c;
            soft_rhs[r] *= d.weight_f2c;
        }
    }

    DenseMatrix Ah, As;
    Vector bh, bs;
    stack(hard_rows, hard_rhs, Ah, bh);
    stack(soft_rows, soft_rhs, As, bs);

    Eigen::JacobiSVD<DenseMatrix> svd(Ah, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double cut = 1e-10 * sv[0];
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv[rank] > cut) ++rank;
    const Vector x0 = svd.solve(bh);
    const double hard_residual = (Ah * x0 - bh).norm();
    if (hard_residual > 1e-9 * std::max(1.0, bh.norm())) {
        throw UnsupportedOperatorError("sbp_operators",
                                       "interpolation closure constraints are inconsistent (residual " +
                                           std::to_string(hard_residual) + ")");
    }
    const DenseMatrix N = svd.matrixV().rightCols(n - rank);

    // Least squares on the soft rows over the null space of the hard rows, with
    // a small ridge term to pin down any remaining freedom.
    constexpr double ridge = 1e-4;
    DenseMatrix K(As.rows() + N.cols(), N.cols());
    Vector r(As.rows() + N.cols());
    K << As * N, ridge * DenseMatrix::Identity(N.cols(), N.cols());
    r << bs - As * x0, -ridge * (N.transpose() * x0);
    const Vector z = K.colPivHouseholderQr().solve(r);
    const Vector x = x0 + N * z;

    DenseMatrix left = P.topRows(nf);
    for (int f = 0; f < nf; ++f)
        for (int j = 0; j < nc; ++j) left(f, j) = x[unknown(f, j)];
    return left;
}

}  // namespace

std::string_view to_string(InterpolationKind kind) {
    return kind == InterpolationKind::traditional ? "traditional" : "op";
}

InterpolationKind parse_interpolation_kind(std::string_view text) {
    if (text == "traditional" || text == "trad") return InterpolationKind::traditional;
    if (text == "op" || text == "order_preserving") return InterpolationKind::order_preserving;
    throw UnsupportedOperatorError("sbp_operators", "unknown interpolation kind '" + std::string(text) + "'");
}

int min_interpolation_points(int order) {
    if (!is_supported_order(order)) {
        throw UnsupportedOperatorError("sbp_operators",
                                       "no interpolation operators of order " + std::to_string(order));
    }
    const Design d = design_for(order, InterpolationKind::traditional, GoodMember::fine_to_coarse);
    return 2 * d.coarse_cols + 1;
}

SparseMatrix norm_compatible_partner(const SparseMatrix& coarse_to_fine, const Vector& H_coarse,
                                     const Vector& H_fine) {
    SparseMatrix t = SparseMatrix(coarse_to_fine.transpose());
    for (Eigen::Index i = 0; i < t.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(t, i); it; ++it) {
            it.valueRef() *= H_fine[it.col()] / H_coarse[it.row()];
        }
    }
    return t;
}

InterpolationPair build_interpolation_pair(int order, InterpolationKind kind, int m_coarse, GoodMember good) {
    if (!is_supported_order(order)) {
        throw UnsupportedOperatorError("sbp_operators", "no " + std::string(to_string(kind)) +
                                                            " interpolation of order " + std::to_string(order));
    }
    const int min_points = min_interpolation_points(order);
    if (m_coarse < min_points) {
        throw SizingError("sbp_operators", "order " + std::to_string(order) + " interpolation needs at least " +
                                               std::to_string(min_points) + " coarse points, got " +
                                               std::to_string(m_coarse));
    }

    const Design d = design_for(order, kind, good);
    const DenseMatrix left = solve_left_closure(order, d);

    const int mc = m_coarse;
    const int mf = 2 * mc - 1;
    const int nf = d.fine_rows;
    std::vector<Triplet> t;
    for (const auto& e : interior_rows(order, mc, d.smoothing)) {
        if (e.row() < nf || e.row() >= mf - nf) continue;
        t.push_back(e);
    }
    for (int f = 0; f < nf; ++f) {
        for (Eigen::Index j = 0; j < left.cols(); ++j) {
            const double v = left(f, j);
            if (v == 0.0 || j >= mc) continue;
            t.emplace_back(f, static_cast<int>(j), v);
            t.emplace_back(mf - 1 - f, mc - 1 - static_cast<int>(j), v);
        }
    }

    InterpolationPair pair;
    pair.kind = kind;
    pair.good = good;
    pair.order = order;
    pair.m_coarse = mc;
    pair.m_fine = mf;
    pair.coarse_to_fine.resize(mf, mc);
    pair.coarse_to_fine.setFromTriplets(t.begin(), t.end());
    pair.H_coarse = unit_norm(order, mc);
    pair.H_fine = unit_norm(order, mf) * 0.5;
    pair.fine_to_coarse = norm_compatible_partner(pair.coarse_to_fine, pair.H_coarse, pair.H_fine);
    pair.coarse_to_fine_degree = d.hard_c2f;
    pair.fine_to_coarse_degree = d.hard_f2c;
    return pair;
}

namespace {

int measured_degree(const SparseMatrix& op, const Vector& from, const Vector& to, int max_degree) {
    int degree = -1;
    for (int q = 0; q <= max_degree; ++q) {
        const Vector src = from.array().pow(q);
        const Vector expect = to.array().pow(q);
        const Vector got = op * src;
        const double scale = std::max(1.0, src.cwiseAbs().maxCoeff());
        if ((got - expect).cwiseAbs().maxCoeff() > 1e-10 * scale) break;
        degree = q;
    }
    return degree;
}

}  // namespace

InterpolationReport certify_interpolation(const InterpolationPair& pair) {
    InterpolationReport r;
    const DenseMatrix lhs = pair.H_coarse.asDiagonal() * to_dense(pair.fine_to_coarse);
    const DenseMatrix rhs = to_dense(pair.coarse_to_fine).transpose() * pair.H_fine.asDiagonal();
    r.norm_compatibility_residual = (lhs - rhs).cwiseAbs().maxCoeff();

    r.c2f_constant_defect = (pair.coarse_to_fine * Vector::Ones(pair.m_coarse) - Vector::Ones(pair.m_fine))
                                .cwiseAbs()
                                .maxCoeff();
    r.f2c_constant_defect = (pair.fine_to_coarse * Vector::Ones(pair.m_fine) - Vector::Ones(pair.m_coarse))
                                .cwiseAbs()
                                .maxCoeff();

    // Coordinates on [-1, 1] keep the monomials bounded.
    Vector xc = Vector::LinSpaced(pair.m_coarse, -1.0, 1.0);
    Vector xf = Vector::LinSpaced(pair.m_fine, -1.0, 1.0);
    r.c2f_degree = measured_degree(pair.coarse_to_fine, xc, xf, pair.order + 2);
    r.f2c_degree = measured_degree(pair.fine_to_coarse, xf, xc, pair.order + 2);
    return r;
}

}  // namespace ncwave
