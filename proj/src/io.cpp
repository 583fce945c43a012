#include "ncwave/io.hpp"

#include "ncwave/errors.hpp"

#include <filesystem>
#include <istream>
#include <ostream>

namespace ncwave {

void write_triplets(std::ostream& out, const SparseMatrix& a) {
    out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    const auto old = out.precision(17);
    for (Eigen::Index i = 0; i < a.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(a, i); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    out.precision(old);
}

SparseMatrix read_triplets(std::istream& in) {
    long rows = 0, cols = 0, nnz = 0;
    if (!(in >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
        throw Error("io", "bad triplet header");
    }
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(nnz));
    for (long k = 0; k < nnz; ++k) {
        long i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v)) throw Error("io", "triplet stream ended after " + std::to_string(k) + " entries");
        if (i < 0 || i >= rows || j < 0 || j >= cols) throw Error("io", "triplet index out of range");
        t.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
    }
    SparseMatrix a(rows, cols);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

SparseMatrix diagonal_matrix(const Vector& d) {
    SparseMatrix a(d.size(), d.size());
    std::vector<Triplet> t;
    for (Eigen::Index i = 0; i < d.size(); ++i) t.emplace_back(static_cast<int>(i), static_cast<int>(i), d[i]);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw Error("io", "cannot create directory " + path + ": " + ec.message());
}

}  // namespace ncwave
