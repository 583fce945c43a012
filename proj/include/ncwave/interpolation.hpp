#pragma once

#include "ncwave/sbp_operators.hpp"

#include <string_view>

namespace ncwave {

enum class InterpolationKind { traditional, order_preserving };

/// Which member of an order-preserving pair carries the extra order.
enum class GoodMember { fine_to_coarse, coarse_to_fine };

std::string_view to_string(InterpolationKind kind);
InterpolationKind parse_interpolation_kind(std::string_view text);

/// Coarse/fine transfer operators across a 1:2 interface. The fine grid has
/// 2 m_coarse - 1 points and both grids carry the SBP quadrature of `order`.
///
/// The pair is norm-compatible, H_c * I_f2c = I_c2f^T * H_f, so I_f2c is
/// always derived from I_c2f and the two quadratures.
struct InterpolationPair {
    InterpolationKind kind = InterpolationKind::traditional;
    GoodMember good = GoodMember::fine_to_coarse;  ///< meaningful for order_preserving only
    int order = 0;
    int m_coarse = 0;
    int m_fine = 0;
    SparseMatrix coarse_to_fine;  ///< m_fine x m_coarse
    SparseMatrix fine_to_coarse;  ///< m_coarse x m_fine
    Vector H_coarse;              ///< interface quadratures at unit coarse spacing
    Vector H_fine;

    /// Degree of polynomial exactness the construction guarantees at the closures.
    int coarse_to_fine_degree = 0;
    int fine_to_coarse_degree = 0;
};

/// Smallest coarse point count for which the two closures do not interact.
int min_interpolation_points(int order);

/// Builds the pair. For `order_preserving`, `good` selects the member that is
/// exact to one polynomial degree beyond the traditional operators; the other
/// member gives up the corresponding degree. Throws UnsupportedOperatorError
/// for orders other than 4 and 6, SizingError for m_coarse too small.
InterpolationPair build_interpolation_pair(int order, InterpolationKind kind, int m_coarse,
                                           GoodMember good = GoodMember::fine_to_coarse);

/// Rebuilds I_f2c from I_c2f through the norm-compatibility relation. Useful
/// after editing I_c2f by hand.
SparseMatrix norm_compatible_partner(const SparseMatrix& coarse_to_fine, const Vector& H_coarse,
                                     const Vector& H_fine);

struct InterpolationReport {
    double norm_compatibility_residual = 0.0;  ///< max |H_c I_f2c - I_c2f^T H_f|
    double c2f_constant_defect = 0.0;          ///< max |row sum - 1|
    double f2c_constant_defect = 0.0;
    int c2f_degree = -1;  ///< measured exactness degree over all rows
    int f2c_degree = -1;

    bool passed() const {
        return norm_compatibility_residual <= 1e-12 && c2f_constant_defect <= 1e-12 &&
               f2c_constant_defect <= 1e-12;
    }
};

InterpolationReport certify_interpolation(const InterpolationPair& pair);

}  // namespace ncwave
