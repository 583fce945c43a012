#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace ncwave {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// One-dimensional diagonal-norm SBP second-derivative operator,
///
///     D2 = H^{-1} (-M + e_r d_r^T - e_l d_l^T),
///
/// with H diagonal positive and M symmetric positive semi-definite.
/// Interior rows are the central 2p-order stencil; the closures are
/// accurate to order p. `order` is the interior accuracy 2p.
struct SbpOperator1D {
    int order = 0;
    int m = 0;
    double h = 0.0;
    Vector H;         ///< diagonal of the quadrature, already scaled by h
    SparseMatrix M;   ///< stiffness, scaled by 1/h
    SparseMatrix D2;  ///< scaled by 1/h^2
    Vector e_l, e_r;  ///< pick first / last entry
    Vector d_l, d_r;  ///< one-sided first derivative at the ends, scaled by 1/h
};

/// Orders with coefficient tables available.
bool is_supported_order(int order);

/// Number of boundary closure rows for the given order (4 or 6).
int closure_rows(int order);

/// Smallest admissible point count: two non-overlapping closures plus one
/// interior row.
int min_points(int order);

/// Builds the operator on `m` equidistant points with spacing `h`.
/// Throws UnsupportedOperatorError for orders other than 4 and 6 and
/// SizingError when `m < min_points(order)` or `h <= 0`.
SbpOperator1D build_sbp_d2(int order, int m, double h);

struct CertificationReport {
    double sbp_residual = 0.0;     ///< max |H D2 - (-M + e_r d_r^T - e_l d_l^T)|, times h
    double m_symmetry_defect = 0.0;
    double m_min_eigenvalue = 0.0;  ///< NaN when m is too large for the dense check
    double m_norm = 0.0;
    double h_min = 0.0;
    int interior_degree = -1;  ///< highest degree reproduced by all interior rows
    int closure_degree = -1;   ///< highest degree reproduced by all closure rows
    int derivative_degree = -1;  ///< highest degree for which d_l and d_r are exact
    bool h_positive = false;
    bool m_symmetric = false;
    bool m_psd = false;
    bool identity_ok = false;

    bool passed() const { return h_positive && m_symmetric && m_psd && identity_ok; }
    std::vector<std::string> failures() const;
};

/// Checks the SBP identity, M symmetry and definiteness, H positivity, and
/// measures polynomial exactness of interior rows, closure rows and the
/// boundary derivative rows. Failures are reported, never thrown. The dense
/// eigen check runs only for m <= `dense_limit`.
CertificationReport certify_sbp(const SbpOperator1D& op, int dense_limit = 200);

/// Dense copy of a sparse operator, for small-size checks.
DenseMatrix to_dense(const SparseMatrix& a);

}  // namespace ncwave
