#include "ncwave/coupling.hpp"

#include "ncwave/errors.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ncwave {

std::string_view to_string(CouplingMethod method) {
    return method == CouplingMethod::projection ? "projection" : "hybrid";
}

std::string_view to_string(Orientation orientation) {
    return orientation == Orientation::standard ? "standard" : "mirrored";
}

CouplingMethod parse_coupling_method(std::string_view text) {
    if (text == "projection" || text == "sbp-p") return CouplingMethod::projection;
    if (text == "hybrid" || text == "sbp-p-sat") return CouplingMethod::hybrid;
    throw ConfigError("unknown coupling method '" + std::string(text) + "'");
}

Orientation parse_orientation(std::string_view text) {
    if (text == "standard") return Orientation::standard;
    if (text == "mirrored") return Orientation::mirrored;
    throw ConfigError("unknown orientation '" + std::string(text) + "'");
}

GoodMember good_member_for(Orientation orientation, bool op_substitution) {
    // Continuity goes right-to-left (fine-to-coarse) in the standard form.
    const bool continuity_is_f2c = orientation == Orientation::standard;
    if (continuity_is_f2c == op_substitution) return GoodMember::fine_to_coarse;
    return GoodMember::coarse_to_fine;
}

InterfaceSpec make_interface_spec(const BlockDiscretization& left, const BlockDiscretization& right,
                                  InterpolationKind kind, CouplingMethod method, Orientation orientation,
                                  bool op_substitution) {
    const auto& gl = left.grid;
    const auto& gr = right.grid;
    if (left.order != right.order) throw SizingError("coupling", "blocks use different SBP orders");
    if (gr.m_y != 2 * gl.m_y - 1) {
        throw SizingError("coupling", "interface needs a 1:2 ratio: right block has " + std::to_string(gr.m_y) +
                                          " points, expected " + std::to_string(2 * gl.m_y - 1));
    }
    const double tol = 1e-12 * std::max({1.0, std::abs(gl.x_max), std::abs(gl.y_max)});
    if (std::abs(gl.y_min - gr.y_min) > tol || std::abs(gl.y_max - gr.y_max) > tol) {
        throw SizingError("coupling", "blocks do not share the interface y-range");
    }
    if (std::abs(gl.x_max - gr.x_min) > tol) {
        throw SizingError("coupling", "left east side and right west side do not meet");
    }
    InterfaceSpec spec;
    spec.method = method;
    spec.orientation = orientation;
    spec.op_substitution = op_substitution;
    spec.interpolation =
        build_interpolation_pair(left.order, kind, gl.m_y, good_member_for(orientation, op_substitution));
    return spec;
}

namespace {

SparseMatrix hstack(const SparseMatrix& a, const SparseMatrix& b) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros() + b.nonZeros()));
    for (Eigen::Index i = 0; i < a.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(a, i); it; ++it)
            t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (Eigen::Index i = 0; i < b.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(b, i); it; ++it)
            t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col() + a.cols()), it.value());
    SparseMatrix s(a.rows(), a.cols() + b.cols());
    s.setFromTriplets(t.begin(), t.end());
    return s;
}

SparseMatrix vstack(const SparseMatrix& a, const SparseMatrix& b) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros() + b.nonZeros()));
    for (Eigen::Index i = 0; i < a.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(a, i); it; ++it)
            t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (Eigen::Index i = 0; i < b.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(b, i); it; ++it)
            t.emplace_back(static_cast<int>(it.row() + a.rows()), static_cast<int>(it.col()), it.value());
    SparseMatrix s(a.rows() + b.rows(), a.cols());
    s.setFromTriplets(t.begin(), t.end());
    return s;
}

SparseMatrix zeros(Eigen::Index rows, Eigen::Index cols) { return SparseMatrix(rows, cols); }

void check_pair(const InterfaceSpec& spec, const BlockDiscretization& left, const BlockDiscretization& right) {
    const auto& ip = spec.interpolation;
    if (ip.m_coarse != left.grid.m_y || ip.m_fine != right.grid.m_y) {
        throw SizingError("coupling", "interpolation pair does not match the interface point counts");
    }
}

}  // namespace

SparseMatrix build_constraint(const InterfaceSpec& spec, const BlockDiscretization& left,
                              const BlockDiscretization& right) {
    check_pair(spec, left, right);
    const SparseMatrix& v2u = spec.interpolation.fine_to_coarse;
    const SparseMatrix& u2v = spec.interpolation.coarse_to_fine;
    const double c1sq = left.c * left.c;
    const double c2sq = right.c * right.c;
    const SparseMatrix& eE = left.trace(Side::east);
    const SparseMatrix& dE = left.derivative(Side::east);
    const SparseMatrix& eW = right.trace(Side::west);
    const SparseMatrix& dW = right.derivative(Side::west);

    SparseMatrix continuity, flux;
    if (spec.orientation == Orientation::standard) {
        continuity = hstack(eE, SparseMatrix(-(v2u * eW)));
        flux = hstack(SparseMatrix(c1sq * (u2v * dE)), SparseMatrix(-c2sq * dW));
    } else {
        continuity = hstack(SparseMatrix(u2v * eE), SparseMatrix(-eW));
        flux = hstack(SparseMatrix(c1sq * dE), SparseMatrix(-c2sq * (v2u * dW)));
    }
    if (spec.method == CouplingMethod::hybrid) return continuity;
    return vstack(continuity, flux);
}

SparseMatrix build_interface_sat(const InterfaceSpec& spec, const BlockDiscretization& left,
                                 const BlockDiscretization& right) {
    if (spec.method != CouplingMethod::hybrid) {
        throw MisuseError("coupling", "the interface SAT belongs to the hybrid method only");
    }
    check_pair(spec, left, right);
    const SparseMatrix& v2u = spec.interpolation.fine_to_coarse;
    const SparseMatrix& u2v = spec.interpolation.coarse_to_fine;
    const double c1sq = left.c * left.c;
    const double c2sq = right.c * right.c;
    const Eigen::Index nu = left.grid.size();
    const Eigen::Index nv = right.grid.size();

    if (spec.orientation == Orientation::standard) {
        // Weak flux condition on the fine block:
        // -(H_x^v)^{-1} e_W^T (c1^2 I_u2v d_E u - c2^2 d_W v)
        const Vector inv = right.H_x.cwiseInverse();
        const SparseMatrix lift = inv.asDiagonal() * SparseMatrix(right.trace(Side::west).transpose());
        const SparseMatrix on_u = -c1sq * (lift * SparseMatrix(u2v * left.derivative(Side::east)));
        const SparseMatrix on_v = c2sq * (lift * right.derivative(Side::west));
        return vstack(zeros(nu, nu + nv), hstack(on_u, on_v));
    }
    // Mirrored: on the coarse block,
    // -(H_x^u)^{-1} e_E^T (c1^2 d_E u - c2^2 I_v2u d_W v)
    const Vector inv = left.H_x.cwiseInverse();
    const SparseMatrix lift = inv.asDiagonal() * SparseMatrix(left.trace(Side::east).transpose());
    const SparseMatrix on_u = -c1sq * (lift * left.derivative(Side::east));
    const SparseMatrix on_v = c2sq * (lift * SparseMatrix(v2u * right.derivative(Side::west)));
    return vstack(hstack(on_u, on_v), zeros(nv, nu + nv));
}

namespace {

/// Rows of the (scaled) Gram matrix beyond its numerical rank, by column-pivoted QR.
std::vector<Eigen::Index> dependent_rows(const Eigen::SparseMatrix<double>& gram) {
    Eigen::ColPivHouseholderQR<DenseMatrix> qr{DenseMatrix(gram)};
    qr.setThreshold(std::sqrt(std::numeric_limits<double>::epsilon()));
    std::vector<Eigen::Index> rows;
    for (Eigen::Index k = qr.rank(); k < gram.rows(); ++k) rows.push_back(qr.colsPermutation().indices()[k]);
    std::sort(rows.begin(), rows.end());
    return rows;
}

}  // namespace

Projection::Projection(SparseMatrix L, Vector weights) : L_(std::move(L)), weights_(std::move(weights)) {
    if (L_.cols() != weights_.size()) throw SizingError("coupling", "constraint width does not match the weights");
    if (L_.rows() == 0) return;

    inverse_weights_ = weights_.cwiseInverse();
    const SparseMatrix weighted_lt = inverse_weights_.asDiagonal() * SparseMatrix(L_.transpose());
    Eigen::SparseMatrix<double> gram = L_ * weighted_lt;

    const Vector diag = gram.diagonal();
    const double eps = std::numeric_limits<double>::epsilon();
    const double largest = diag.cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> empty;
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        if (!(diag[i] > eps * largest)) empty.push_back(i);
    if (!empty.empty() || !(largest > 0.0)) {
        std::ostringstream msg;
        msg << "constraint rows with no content:";
        for (auto i : empty) msg << ' ' << i;
        throw RankDeficiencyError("coupling", msg.str());
    }

    scaling_ = diag.cwiseSqrt().cwiseInverse();
    Eigen::SparseMatrix<double> scaled = scaling_.asDiagonal() * gram * scaling_.asDiagonal();
    auto gram_factor = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(scaled);
    const Vector pivots = gram_factor->info() == Eigen::Success ? Vector(gram_factor->vectorD()) : Vector();
    const double pmax = pivots.size() ? pivots.cwiseAbs().maxCoeff() : 0.0;
    const double pmin = pivots.size() ? pivots.minCoeff() : 0.0;
    condition_ = pmin > 0.0 ? pmax / pmin : std::numeric_limits<double>::infinity();
    if (!(condition_ <= 1.0 / std::sqrt(eps))) {
        std::ostringstream msg;
        msg << "Gram matrix is numerically singular (pivot ratio " << condition_
            << "); dependent constraint rows:";
        for (auto i : dependent_rows(scaled)) msg << ' ' << i;
        throw RankDeficiencyError("coupling", msg.str());
    }
    gram_ = std::move(gram_factor);
}

void Projection::apply(const Vector& w, Vector& out) const {
    if (L_.rows() == 0) {
        out = w;
        return;
    }
    const Vector lw = L_ * w;
    const Vector z = scaling_.cwiseProduct(gram_->solve(scaling_.cwiseProduct(lw)));
    // Only unknowns touched by L change.
    out = w;
    for (Eigen::Index i = 0; i < L_.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(L_, i); it; ++it)
            out[it.col()] -= it.value() * inverse_weights_[it.col()] * z[i];
}

Vector Projection::operator()(const Vector& w) const {
    Vector out;
    apply(w, out);
    return out;
}

Projection build_projection(const SparseMatrix& L, const Vector& weights) { return Projection(L, weights); }

CoupledSystem::CoupledSystem(BlockDiscretization left, BlockDiscretization right, InterfaceSpec spec)
    : left_(std::move(left)), right_(std::move(right)), spec_(std::move(spec)) {
    const Eigen::Index nu = left_.grid.size();
    const Eigen::Index nv = right_.grid.size();
    SparseMatrix d = vstack(hstack(left_.rhs_operator(left_mask()), zeros(nu, nv)),
                            hstack(zeros(nv, nu), right_.rhs_operator(right_mask())));
    if (spec_.method == CouplingMethod::hybrid) {
        sat_ = build_interface_sat(spec_, left_, right_);
        d_tilde_ = d + sat_;
    } else {
        sat_ = zeros(nu + nv, nu + nv);
        d_tilde_ = std::move(d);
    }
    d_tilde_.prune(0.0);
    energy_left_ = left_.energy_matrix();
    energy_right_ = right_.energy_matrix();

    Vector weights(nu + nv);
    weights << left_.H_bar, right_.H_bar;
    projection_ = Projection(build_constraint(spec_, left_, right_), std::move(weights));
}

void CoupledSystem::apply_q(const Vector& w, Vector& out) const {
    Vector tmp;
    projection_.apply(w, tmp);
    const Vector dw = d_tilde_ * tmp;
    projection_.apply(dw, out);
}

Vector CoupledSystem::apply_q(const Vector& w) const {
    Vector out;
    apply_q(w, out);
    return out;
}

Vector CoupledSystem::inject(const BoundaryValues& left_data, const BoundaryValues& right_data) const {
    Vector f(size());
    f << left_.data_injection(left_data, left_mask()), right_.data_injection(right_data, right_mask());
    return projection_(f);
}

DenseMatrix CoupledSystem::assemble_q_dense() const {
    const Eigen::Index n = size();
    DenseMatrix q(n, n);
    Vector unit = Vector::Zero(n);
    Vector col;
    for (Eigen::Index j = 0; j < n; ++j) {
        unit[j] = 1.0;
        apply_q(unit, col);
        q.col(j) = col;
        unit[j] = 0.0;
    }
    return q;
}

double CoupledSystem::energy(const Vector& w, const Vector& w_t) const {
    const Vector hat = projection_(w);
    const Vector u = left_part(hat);
    const Vector v = right_part(hat);
    const double kinetic = w_t.dot(weights().cwiseProduct(w_t));
    return kinetic + left_.c * left_.c * u.dot(energy_left_ * u) + right_.c * right_.c * v.dot(energy_right_ * v);
}

Vector CoupledSystem::join(const Vector& u, const Vector& v) const {
    Vector w(u.size() + v.size());
    w << u, v;
    return w;
}

CoupledSystem assemble_q(const InterfaceSpec& spec, const BlockDiscretization& left,
                         const BlockDiscretization& right) {
    if (left.order != right.order) throw SizingError("coupling", "blocks use different SBP orders");
    return CoupledSystem(left, right, spec);
}

}  // namespace ncwave
