#include "ncwave/block.hpp"

#include "ncwave/errors.hpp"

#include <iomanip>
#include <ostream>

namespace ncwave {

std::string_view to_string(Side side) {
    switch (side) {
        case Side::west: return "west";
        case Side::east: return "east";
        case Side::south: return "south";
        case Side::north: return "north";
    }
    return "?";
}

const Vector& BoundaryValues::operator[](Side s) const {
    switch (s) {
        case Side::west: return west;
        case Side::east: return east;
        case Side::south: return south;
        case Side::north: return north;
    }
    return west;
}

Vector& BoundaryValues::operator[](Side s) {
    return const_cast<Vector&>(static_cast<const BoundaryValues&>(*this)[s]);
}

BoundaryValues BoundaryValues::zeros(const BlockGrid& grid) {
    return {Vector::Zero(grid.m_y), Vector::Zero(grid.m_y), Vector::Zero(grid.m_x), Vector::Zero(grid.m_x)};
}

BoundaryData BoundaryData::zero(const BlockGrid& grid) {
    auto z = [grid](double) { return BoundaryValues::zeros(grid); };
    return {z, z, z};
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
    for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator ia(a, i); ia; ++ia) {
            for (Eigen::Index j = 0; j < b.outerSize(); ++j) {
                for (SparseMatrix::InnerIterator ib(b, j); ib; ++ib) {
                    t.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                                   static_cast<int>(ia.col() * b.cols() + ib.col()), ia.value() * ib.value());
                }
            }
        }
    }
    SparseMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    k.setFromTriplets(t.begin(), t.end());
    return k;
}

SparseMatrix sparse_identity(int n) {
    SparseMatrix i(n, n);
    i.setIdentity();
    return i;
}

SparseMatrix row_vector(const Vector& v) {
    std::vector<Triplet> t;
    for (Eigen::Index j = 0; j < v.size(); ++j)
        if (v[j] != 0.0) t.emplace_back(0, static_cast<int>(j), v[j]);
    SparseMatrix r(1, v.size());
    r.setFromTriplets(t.begin(), t.end());
    return r;
}

BlockDiscretization build_block(const BlockGrid& grid, double c, int order) {
    if (!(grid.x_max > grid.x_min) || !(grid.y_max > grid.y_min)) {
        throw SizingError("block_discretization", "block extents must be non-empty");
    }
    BlockDiscretization b;
    b.grid = grid;
    b.c = c;
    b.order = order;
    b.op_x = build_sbp_d2(order, grid.m_x, grid.h_x());
    b.op_y = build_sbp_d2(order, grid.m_y, grid.h_y());

    const SparseMatrix Ix = sparse_identity(grid.m_x);
    const SparseMatrix Iy = sparse_identity(grid.m_y);
    b.D2x = kron(b.op_x.D2, Iy);
    b.D2y = kron(Ix, b.op_y.D2);
    b.D_L = b.D2x + b.D2y;
    b.M_x = kron(b.op_x.M, Iy);
    b.M_y = kron(Ix, b.op_y.M);

    b.H_x.resize(grid.size());
    b.H_y.resize(grid.size());
    for (int ix = 0; ix < grid.m_x; ++ix) {
        for (int iy = 0; iy < grid.m_y; ++iy) {
            b.H_x[grid.index(ix, iy)] = b.op_x.H[ix];
            b.H_y[grid.index(ix, iy)] = b.op_y.H[iy];
        }
    }
    b.H_bar = b.H_x.cwiseProduct(b.H_y);

    auto at = [](Side s) { return static_cast<std::size_t>(s); };
    b.e[at(Side::west)] = kron(row_vector(b.op_x.e_l), Iy);
    b.e[at(Side::east)] = kron(row_vector(b.op_x.e_r), Iy);
    b.e[at(Side::south)] = kron(Ix, row_vector(b.op_y.e_l));
    b.e[at(Side::north)] = kron(Ix, row_vector(b.op_y.e_r));
    b.d[at(Side::west)] = kron(row_vector(b.op_x.d_l), Iy);
    b.d[at(Side::east)] = kron(row_vector(b.op_x.d_r), Iy);
    b.d[at(Side::south)] = kron(Ix, row_vector(b.op_y.d_l));
    b.d[at(Side::north)] = kron(Ix, row_vector(b.op_y.d_r));
    return b;
}

SparseMatrix BlockDiscretization::energy_matrix() const {
    return SparseMatrix(H_y.asDiagonal() * M_x) + SparseMatrix(H_x.asDiagonal() * M_y);
}

namespace {

// Sign of the Neumann SAT on each side: + on west/south, - on east/north.
double sat_sign(Side s) { return (s == Side::west || s == Side::south) ? 1.0 : -1.0; }

const Vector& inverse_weight_source(const BlockDiscretization& b, Side s) {
    return (s == Side::west || s == Side::east) ? b.H_x : b.H_y;
}

}  // namespace

SparseMatrix BlockDiscretization::rhs_operator(SideMask mask) const {
    const double c2 = c * c;
    SparseMatrix a = c2 * D_L;
    for (Side s : kAllSides) {
        if (!mask.contains(s)) continue;
        const Vector scale = (sat_sign(s) * c2) * inverse_weight_source(*this, s).cwiseInverse();
        a += SparseMatrix(scale.asDiagonal() * SparseMatrix(trace(s).transpose() * derivative(s)));
    }
    a.prune(0.0);
    return a;
}

Vector BlockDiscretization::data_injection(const BoundaryValues& g, SideMask mask) const {
    const double c2 = c * c;
    Vector f = Vector::Zero(grid.size());
    for (Side s : kAllSides) {
        if (!mask.contains(s)) continue;
        if (g[s].size() != grid.side_points(s)) {
            throw SizingError("block_discretization", std::string("boundary data on ") + std::string(to_string(s)) +
                                                          " has " + std::to_string(g[s].size()) + " values, side has " +
                                                          std::to_string(grid.side_points(s)) + " points");
        }
        const Vector& w = inverse_weight_source(*this, s);
        f -= (sat_sign(s) * c2) * (trace(s).transpose() * g[s]).cwiseQuotient(w);
    }
    return f;
}

Vector BlockDiscretization::sample(const std::function<double(double, double)>& f) const {
    Vector v(grid.size());
    for (int ix = 0; ix < grid.m_x; ++ix)
        for (int iy = 0; iy < grid.m_y; ++iy) v[grid.index(ix, iy)] = f(grid.x(ix), grid.y(iy));
    return v;
}

Vector apply_neumann_rhs(const BlockDiscretization& disc, const Vector& u, const BoundaryValues& g, SideMask mask) {
    if (u.size() != disc.grid.size()) {
        throw SizingError("block_discretization", "field length does not match the block");
    }
    return disc.rhs_operator(mask) * u + disc.data_injection(g, mask);
}

double block_energy(const BlockDiscretization& disc, const Vector& u, const Vector& u_t) {
    const double kinetic = u_t.dot(disc.H_bar.cwiseProduct(u_t));
    const double potential = u.dot(disc.energy_matrix() * u);
    return kinetic + disc.c * disc.c * potential;
}

void write_field_csv(std::ostream& out, const BlockDiscretization& disc, const Vector& field,
                     std::string_view block_name, bool header) {
    if (header) out << "x,y,value,block\n";
    const auto old = out.precision(17);
    for (int ix = 0; ix < disc.grid.m_x; ++ix) {
        for (int iy = 0; iy < disc.grid.m_y; ++iy) {
            out << disc.grid.x(ix) << ',' << disc.grid.y(iy) << ',' << field[disc.grid.index(ix, iy)] << ','
                << block_name << '\n';
        }
    }
    out.precision(old);
}

}  // namespace ncwave
