#pragma once

#include "ncwave/sbp_operators.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string_view>

namespace ncwave {

enum class Side : std::uint8_t { west = 0, east = 1, south = 2, north = 3 };

inline constexpr std::array<Side, 4> kAllSides{Side::west, Side::east, Side::south, Side::north};

std::string_view to_string(Side side);

/// Set of block sides, used to select which sides receive the Neumann SAT.
class SideMask {
public:
    constexpr SideMask() = default;
    constexpr SideMask(std::initializer_list<Side> sides) {
        for (Side s : sides) bits_ |= bit(s);
    }
    static constexpr SideMask all() { return SideMask{Side::west, Side::east, Side::south, Side::north}; }

    constexpr bool contains(Side s) const { return (bits_ & bit(s)) != 0; }
    constexpr SideMask without(Side s) const {
        SideMask m = *this;
        m.bits_ &= static_cast<std::uint8_t>(~bit(s));
        return m;
    }

private:
    static constexpr std::uint8_t bit(Side s) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s)); }
    std::uint8_t bits_ = 0;
};

/// Equidistant tensor grid on [x_min, x_max] x [y_min, y_max]. Field vectors
/// are column-major: index = ix * m_y + iy, so all y-points of the first
/// x-line come first.
struct BlockGrid {
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    int m_x = 0, m_y = 0;

    double h_x() const { return (x_max - x_min) / (m_x - 1); }
    double h_y() const { return (y_max - y_min) / (m_y - 1); }
    double x(int ix) const { return x_min + ix * h_x(); }
    double y(int iy) const { return y_min + iy * h_y(); }
    int size() const { return m_x * m_y; }
    int index(int ix, int iy) const { return ix * m_y + iy; }
    /// Number of points along the given side.
    int side_points(Side s) const { return (s == Side::west || s == Side::east) ? m_y : m_x; }
};

/// Boundary data at one instant: one value per boundary point. West/east
/// entries are ordered by y, south/north by x.
///
/// The values are the coordinate derivative normal to the side (u_x on
/// west and east, u_y on south and north), so that the penalty factor
/// d_W u - g_W vanishes for consistent data on every side.
struct BoundaryValues {
    Vector west, east, south, north;

    const Vector& operator[](Side s) const;
    Vector& operator[](Side s);

    static BoundaryValues zeros(const BlockGrid& grid);
};

/// Time-dependent boundary data and its first two time derivatives.
struct BoundaryData {
    std::function<BoundaryValues(double)> g;
    std::function<BoundaryValues(double)> g_t;
    std::function<BoundaryValues(double)> g_tt;

    static BoundaryData zero(const BlockGrid& grid);
};

/// 2D operators of one block, built from 1D SBP operators via Kronecker
/// products. All operators act on flat column-major field vectors.
struct BlockDiscretization {
    BlockGrid grid;
    double c = 1.0;
    int order = 0;
    SbpOperator1D op_x, op_y;

    SparseMatrix D2x, D2y, D_L;  ///< D_L = D2x + D2y
    SparseMatrix M_x, M_y;       ///< M kron I, I kron M
    Vector H_x, H_y, H_bar;      ///< diagonals; H_bar = H_x H_y
    std::array<SparseMatrix, 4> e;  ///< trace extractors, indexed by Side
    std::array<SparseMatrix, 4> d;  ///< normal-derivative traces (coordinate direction)

    const SparseMatrix& trace(Side s) const { return e[static_cast<std::size_t>(s)]; }
    const SparseMatrix& derivative(Side s) const { return d[static_cast<std::size_t>(s)]; }

    /// A = H_y M_x + H_x M_y, the energy matrix of the semi-discrete scheme.
    SparseMatrix energy_matrix() const;

    /// c^2 D_L plus the homogeneous part of the Neumann SAT on the masked sides.
    SparseMatrix rhs_operator(SideMask mask) const;

    /// Data part of the Neumann SAT for the masked sides, so that
    /// apply_neumann_rhs(u, g) = rhs_operator(mask) * u + data_injection(g, mask).
    Vector data_injection(const BoundaryValues& g, SideMask mask) const;

    /// Samples f(x, y) on the grid in field order.
    Vector sample(const std::function<double(double, double)>& f) const;
};

/// Throws SizingError (from the 1D builder) for grids below the closure width.
BlockDiscretization build_block(const BlockGrid& grid, double c, int order);

/// c^2 D_L u plus the Neumann SAT with data g on the masked sides. Throws
/// SizingError when a data vector does not match its side.
Vector apply_neumann_rhs(const BlockDiscretization& disc, const Vector& u, const BoundaryValues& g,
                         SideMask mask);

/// E = ||v_t||^2_H + c^2 u^T A u for a single block.
double block_energy(const BlockDiscretization& disc, const Vector& u, const Vector& u_t);

/// Writes "x,y,value,block" rows in field order.
void write_field_csv(std::ostream& out, const BlockDiscretization& disc, const Vector& field,
                     std::string_view block_name, bool header = true);

/// Kronecker product of two sparse matrices.
SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix sparse_identity(int n);
SparseMatrix row_vector(const Vector& v);

}  // namespace ncwave
