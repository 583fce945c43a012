#pragma once

#include "ncwave/block.hpp"
#include "ncwave/interpolation.hpp"

#include <Eigen/SparseCholesky>

#include <memory>
#include <string_view>

namespace ncwave {

/// Projection only (SBP-P), or projection for continuity of the solution and
/// a SAT for continuity of the flux (SBP-P-SAT).
enum class CouplingMethod { projection, hybrid };

/// Standard: continuity interpolates right to left, the flux condition left
/// to right. Mirrored swaps both directions.
enum class Orientation { standard, mirrored };

std::string_view to_string(CouplingMethod method);
std::string_view to_string(Orientation orientation);
CouplingMethod parse_coupling_method(std::string_view text);
Orientation parse_orientation(std::string_view text);

/// Interface between a coarse left block (its east side) and a fine right
/// block (its west side) with a 1:2 point ratio along the interface.
struct InterfaceSpec {
    InterpolationPair interpolation;
    CouplingMethod method = CouplingMethod::projection;
    Orientation orientation = Orientation::standard;
    /// Order-preserving pairs only: impose continuity with the good member
    /// and the flux condition with the bad one. Ignored for traditional pairs.
    bool op_substitution = true;
};

/// Which member of an order-preserving pair must be the good one for the
/// given orientation and substitution choice.
GoodMember good_member_for(Orientation orientation, bool op_substitution);

/// Builds the interpolation pair matching `left`/`right` and validates the
/// geometry: equal y-ranges, shared x = interface, and m_y(right) = 2 m_y(left) - 1.
InterfaceSpec make_interface_spec(const BlockDiscretization& left, const BlockDiscretization& right,
                                  InterpolationKind kind, CouplingMethod method,
                                  Orientation orientation = Orientation::standard, bool op_substitution = true);

/// Constraint operator L on the global vector w = [u; v].
SparseMatrix build_constraint(const InterfaceSpec& spec, const BlockDiscretization& left,
                              const BlockDiscretization& right);

/// Interface SAT on the global vector (hybrid method only; MisuseError otherwise).
SparseMatrix build_interface_sat(const InterfaceSpec& spec, const BlockDiscretization& left,
                                 const BlockDiscretization& right);

/// Orthogonal projection onto ker(L) with respect to the diagonal weight
/// Ĥ, applied as w - Ĥ^{-1} L^T (L Ĥ^{-1} L^T)^{-1} L w. The Gram matrix is
/// equilibrated and factored once.
class Projection {
public:
    Projection() = default;
    /// Throws RankDeficiencyError when the Gram matrix is numerically singular.
    Projection(SparseMatrix L, Vector weights);

    void apply(const Vector& w, Vector& out) const;
    Vector operator()(const Vector& w) const;

    const SparseMatrix& constraint() const { return L_; }
    const Vector& weights() const { return weights_; }
    Eigen::Index size() const { return weights_.size(); }
    /// max/min pivot ratio of the equilibrated Gram factorisation.
    double condition_estimate() const { return condition_; }

private:
    SparseMatrix L_;
    Vector weights_;
    Vector inverse_weights_;
    Vector scaling_;            // Gram equilibration
    // Factorisation is not copyable; copies share it read-only.
    std::shared_ptr<const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> gram_;
    double condition_ = 1.0;
};

Projection build_projection(const SparseMatrix& L, const Vector& weights);

/// The assembled coupled right-hand side
///
///     w_tt = Q w + G(t),   Q = P (D + SAT) P,   G = P F(t),
///
/// where D = blockdiag(c1^2 D_L, c2^2 D_L) plus Neumann SATs on the outer
/// sides and F is the data part of those SATs.
class CoupledSystem {
public:
    CoupledSystem(BlockDiscretization left, BlockDiscretization right, InterfaceSpec spec);

    const BlockDiscretization& left() const { return left_; }
    const BlockDiscretization& right() const { return right_; }
    const InterfaceSpec& spec() const { return spec_; }
    const Projection& projection() const { return projection_; }
    const SparseMatrix& constraint() const { return projection_.constraint(); }
    const SparseMatrix& interface_sat() const { return sat_; }
    /// D + SAT.
    const SparseMatrix& spatial_operator() const { return d_tilde_; }
    const Vector& weights() const { return projection_.weights(); }

    Eigen::Index size() const { return projection_.size(); }
    Eigen::Index left_size() const { return left_.grid.size(); }

    /// out = Q w. Reentrant.
    void apply_q(const Vector& w, Vector& out) const;
    Vector apply_q(const Vector& w) const;

    /// P F for the given outer-boundary data of both blocks.
    Vector inject(const BoundaryValues& left_data, const BoundaryValues& right_data) const;

    /// Explicit Q, for eigen-oracles at small sizes.
    DenseMatrix assemble_q_dense() const;

    /// Energy of a projected state: ||w_t||^2_Ĥ + sum over blocks of c^2 ŵ^T A ŵ.
    double energy(const Vector& w, const Vector& w_t) const;

    Vector left_part(const Vector& w) const { return w.head(left_size()); }
    Vector right_part(const Vector& w) const { return w.tail(size() - left_size()); }
    Vector join(const Vector& u, const Vector& v) const;

    static SideMask left_mask() { return SideMask::all().without(Side::east); }
    static SideMask right_mask() { return SideMask::all().without(Side::west); }

private:
    BlockDiscretization left_;
    BlockDiscretization right_;
    InterfaceSpec spec_;
    SparseMatrix sat_;
    SparseMatrix d_tilde_;
    SparseMatrix energy_left_, energy_right_;
    Projection projection_;
};

/// Builds both blocks' operators and assembles Q for the given interface.
CoupledSystem assemble_q(const InterfaceSpec& spec, const BlockDiscretization& left,
                         const BlockDiscretization& right);

}  // namespace ncwave
