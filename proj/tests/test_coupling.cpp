#include "ncwave/coupling.hpp"
#include "ncwave/diagnostics.hpp"
#include "ncwave/errors.hpp"
#include "ncwave/time_integration.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace ncwave;

namespace {

constexpr double c1 = 1.0, c2 = 0.5;

struct Blocks {
    BlockDiscretization left, right;
};

Blocks make_blocks(int order, int m) {
    return {build_block({-10.0, 0.0, 0.0, 10.0, m, m}, c1, order),
            build_block({0.0, 10.0, 0.0, 10.0, 2 * m - 1, 2 * m - 1}, c2, order)};
}

CoupledSystem make_system(int order, int m, CouplingMethod method, InterpolationKind kind,
                          Orientation orientation = Orientation::standard) {
    auto b = make_blocks(order, m);
    auto spec = make_interface_spec(b.left, b.right, kind, method, orientation);
    return CoupledSystem(std::move(b.left), std::move(b.right), std::move(spec));
}

constexpr CouplingMethod kMethods[] = {CouplingMethod::projection, CouplingMethod::hybrid};
constexpr InterpolationKind kKinds[] = {InterpolationKind::traditional, InterpolationKind::order_preserving};
constexpr Orientation kOrientations[] = {Orientation::standard, Orientation::mirrored};

}  // namespace

TEST_CASE("constraint shapes and constants") {
    for (int order : {4, 6}) {
        const int m = 21;
        auto b = make_blocks(order, m);
        for (auto method : kMethods) {
            for (auto orient : kOrientations) {
                const auto spec = make_interface_spec(b.left, b.right, InterpolationKind::traditional, method, orient);
                const SparseMatrix L = build_constraint(spec, b.left, b.right);
                const int cont_rows = orient == Orientation::standard ? m : 2 * m - 1;
                const int expected = method == CouplingMethod::hybrid ? cont_rows : m + (2 * m - 1);
                CHECK(L.rows() == expected);
                CHECK(L.cols() == b.left.grid.size() + b.right.grid.size());
                const Vector ones = Vector::Ones(L.cols());
                CHECK((L * ones).cwiseAbs().maxCoeff() <= 1e-12);
            }
        }
    }
}

TEST_CASE("constraint residual of the exact solution shrinks under refinement") {
    const AnalyticSolution exact(c1, c2);
    for (int order : {4, 6}) {
        for (auto kind : kKinds) {
            double prev = 0.0;
            for (int m : {26, 51, 101}) {
                const auto sys = make_system(order, m, CouplingMethod::projection, kind);
                const double r = (sys.constraint() * exact.sample(sys, 0.0)).cwiseAbs().maxCoeff();
                if (prev > 0.0) {
                    const double rate = std::log(prev / r) / std::log(2.0);
                    MESSAGE("order " << order << " " << to_string(kind) << " m=" << m << ": residual " << r
                                     << ", observed order " << rate);
                    CHECK(rate > 1.5);
                }
                prev = r;
            }
        }
    }
}

TEST_CASE("projection against a dense oracle") {
    std::mt19937_64 rng(11);
    const int n = 40, r = 7;
    DenseMatrix Ld = DenseMatrix::Zero(r, n);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < n; ++j)
            if ((i + 3 * j) % 5 == 0) Ld(i, j) = oracle::random_vector(rng, 1)[0];
    for (int i = 0; i < r; ++i) Ld(i, i) += 2.0;
    Vector w = oracle::random_vector(rng, n).cwiseAbs().array() + 0.1;
    const SparseMatrix L = Ld.sparseView();
    const Projection P(L, w);
    const DenseMatrix Pd = oracle::projection(Ld, w);
    for (int t = 0; t < 5; ++t) {
        const Vector x = oracle::random_vector(rng, n);
        CHECK((P(x) - Pd * x).cwiseAbs().maxCoeff() <= 1e-12 * x.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("projection edge cases") {
    const Vector w = Vector::Constant(6, 0.5);
    SUBCASE("no constraints is the identity") {
        const Projection P(SparseMatrix(0, 6), w);
        const Vector x = Vector::LinSpaced(6, -1.0, 4.0);
        CHECK(P(x) == x);
    }
    SUBCASE("an empty row is rank deficient") {
        DenseMatrix Ld = DenseMatrix::Zero(2, 6);
        Ld(0, 1) = 1.0;
        CHECK_THROWS_AS(Projection(Ld.sparseView(), w), RankDeficiencyError);
    }
    SUBCASE("a duplicated row is rank deficient and named") {
        DenseMatrix Ld = DenseMatrix::Zero(3, 6);
        Ld(0, 0) = 1.0;
        Ld(0, 3) = -1.0;
        Ld(1, 2) = 1.0;
        Ld.row(2) = Ld.row(0);
        try {
            Projection P(Ld.sparseView(), w);
            FAIL("expected a rank deficiency error");
        } catch (const RankDeficiencyError& e) {
            const std::string what = e.what();
            CHECK(what.find("dependent constraint rows: 2") != std::string::npos);
        }
    }
}

TEST_CASE("projection identities for all variants") {
    std::mt19937_64 rng(5);
    for (int order : {4, 6}) {
        for (auto method : kMethods) {
            for (auto orient : kOrientations) {
                for (auto kind : kKinds) {
                    const auto sys = make_system(order, 21, method, kind, orient);
                    const auto& P = sys.projection();
                    const Vector& W = sys.weights();
                    for (int t = 0; t < 10; ++t) {
                        const Vector a = oracle::random_vector(rng, sys.size());
                        const Vector b = oracle::random_vector(rng, sys.size());
                        const Vector pa = P(a), pb = P(b);
                        CHECK((P(pa) - pa).norm() <= 1e-10 * a.norm());
                        const double na = std::sqrt(a.dot(W.cwiseProduct(a)));
                        const double nb = std::sqrt(b.dot(W.cwiseProduct(b)));
                        CHECK(std::abs(a.dot(W.cwiseProduct(pb)) - pa.dot(W.cwiseProduct(b))) <= 1e-10 * na * nb);
                        CHECK((sys.constraint() * pa).norm() <= 1e-10 * sys.constraint().norm() * a.norm());
                    }
                }
            }
        }
    }
}

TEST_CASE("projected states are continuous across the interface") {
    std::mt19937_64 rng(8);
    const auto sys = make_system(4, 26, CouplingMethod::projection, InterpolationKind::order_preserving);
    const Vector w = sys.projection()(oracle::random_vector(rng, sys.size()));
    const Vector u = sys.left_part(w), v = sys.right_part(w);
    const Vector uE = sys.left().trace(Side::east) * u;
    const Vector vW = sys.spec().interpolation.fine_to_coarse * (sys.right().trace(Side::west) * v);
    CHECK((uE - vW).cwiseAbs().maxCoeff() <= 1e-11 * w.cwiseAbs().maxCoeff());
}

TEST_CASE("interface SAT") {
    const int m = 16;
    auto b = make_blocks(4, m);
    const auto proj = make_interface_spec(b.left, b.right, InterpolationKind::traditional, CouplingMethod::projection);
    CHECK_THROWS_AS(build_interface_sat(proj, b.left, b.right), MisuseError);

    for (auto kind : kKinds) {
        for (auto orient : kOrientations) {
            const auto spec = make_interface_spec(b.left, b.right, kind, CouplingMethod::hybrid, orient);
            const SparseMatrix sat = build_interface_sat(spec, b.left, b.right);
            const Eigen::Index nu = b.left.grid.size();
            const Eigen::Index n = nu + b.right.grid.size();

            CHECK((sat * Vector::Ones(n)).cwiseAbs().maxCoeff() <= 1e-12);

            // Linear states with c1^2 u_x = c2^2 v_x satisfy the flux condition.
            const Vector u = b.left.sample([](double x, double) { return x; });
            const Vector v = b.right.sample([](double x, double) { return 4.0 * x + 1.0; });
            Vector w(n);
            w << u, v;
            CHECK((sat * w).cwiseAbs().maxCoeff() <= 1e-10);

            // Dense assembly from the one-dimensional pieces.
            const auto& opu = b.left.op_x;
            const auto& opv = b.right.op_x;
            const DenseMatrix Iyu = oracle::identity(m), Iyv = oracle::identity(2 * m - 1);
            const DenseMatrix eE = oracle::kron(opu.e_r.transpose(), Iyu);
            const DenseMatrix dE = oracle::kron(opu.d_r.transpose(), Iyu);
            const DenseMatrix eW = oracle::kron(opv.e_l.transpose(), Iyv);
            const DenseMatrix dW = oracle::kron(opv.d_l.transpose(), Iyv);
            const DenseMatrix u2v = oracle::dense(spec.interpolation.coarse_to_fine);
            const DenseMatrix v2u = oracle::dense(spec.interpolation.fine_to_coarse);
            DenseMatrix expect = DenseMatrix::Zero(n, n);
            if (orient == Orientation::standard) {
                const Vector hinv = oracle::kron(opv.H.asDiagonal(), Iyv).diagonal().cwiseInverse();
                const DenseMatrix lift = -(hinv.asDiagonal() * eW.transpose());
                expect.block(nu, 0, n - nu, nu) = lift * (c1 * c1) * u2v * dE;
                expect.block(nu, nu, n - nu, n - nu) = -lift * (c2 * c2) * dW;
            } else {
                const Vector hinv = oracle::kron(opu.H.asDiagonal(), Iyu).diagonal().cwiseInverse();
                const DenseMatrix lift = -(hinv.asDiagonal() * eE.transpose());
                expect.block(0, 0, nu, nu) = lift * (c1 * c1) * dE;
                expect.block(0, nu, nu, n - nu) = -lift * (c2 * c2) * v2u * dW;
            }
            std::mt19937_64 rng(2);
            const Vector x = oracle::random_vector(rng, n);
            const Vector got = sat * x;
            const Vector ref = expect * x;
            CHECK((got - ref).cwiseAbs().maxCoeff() <= 1e-13 * ref.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("assembled Q basics and geometry errors") {
    const auto sys = make_system(4, 16, CouplingMethod::hybrid, InterpolationKind::traditional);
    CHECK(sys.apply_q(Vector::Zero(sys.size())).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sys.apply_q(Vector::Ones(sys.size())).cwiseAbs().maxCoeff() <= 1e-10);

    // Conforming grids cannot be coupled: the ratio is fixed at 1:2.
    auto left = build_block({-1.0, 0.0, 0.0, 1.0, 21, 21}, 1.0, 4);
    auto right = build_block({0.0, 1.0, 0.0, 1.0, 21, 21}, 1.0, 4);
    CHECK_THROWS_AS(make_interface_spec(left, right, InterpolationKind::traditional, CouplingMethod::projection),
                    SizingError);
    auto shifted = build_block({0.0, 1.0, 0.5, 1.5, 41, 41}, 1.0, 4);
    CHECK_THROWS_AS(make_interface_spec(left, shifted, InterpolationKind::traditional, CouplingMethod::projection),
                    SizingError);
    auto other = build_block({0.0, 1.0, 0.0, 1.0, 41, 41}, 1.0, 6);
    CHECK_THROWS_AS(make_interface_spec(left, other, InterpolationKind::traditional, CouplingMethod::projection),
                    SizingError);
}

TEST_CASE("good member follows orientation and substitution") {
    CHECK(good_member_for(Orientation::standard, true) == GoodMember::fine_to_coarse);
    CHECK(good_member_for(Orientation::mirrored, true) == GoodMember::coarse_to_fine);
    CHECK(good_member_for(Orientation::standard, false) == GoodMember::coarse_to_fine);
    CHECK(good_member_for(Orientation::mirrored, false) == GoodMember::fine_to_coarse);
}

TEST_CASE("spectrum of Q at m=11 is real and non-positive") {
    for (auto method : kMethods) {
        for (auto kind : kKinds) {
            for (auto orient : kOrientations) {
                const auto sys = make_system(4, 11, method, kind, orient);
                const auto s = oracle::spectrum(sys.assemble_q_dense());
                CHECK(s.max_real <= 1e-8 * s.max_abs);
                CHECK(s.max_abs_imag <= 1e-8 * s.max_abs);
            }
        }
    }
}

namespace {

double energy_drift(const CoupledSystem& sys, double safety, double T) {
    const auto pulse = [](double x, double y) { return std::exp(-((x + 3) * (x + 3) + (y - 5) * (y - 5)) / 4.0); };
    const Vector f1 = sys.projection()(sys.join(sys.left().sample(pulse), sys.right().sample(pulse)));
    IntegratorConfig cfg;
    cfg.T = T;
    cfg.k = safety * max_stable_step(10.67, sys.left().grid.h_x());
    IntegrateOptions opts;
    opts.energy = [&sys](const Vector& w, const Vector& wt) { return sys.energy(w, wt); };
    const auto r = integrate([&sys](const Vector& w, Vector& out) { sys.apply_q(w, out); }, {}, f1,
                             Vector::Zero(sys.size()), cfg, opts);
    return max_relative_drift(r.energy_trace);
}

}  // namespace

TEST_CASE("energy drift has fourth-order scaling in k") {
    for (auto method : kMethods) {
        const auto sys = make_system(4, 26, method, InterpolationKind::order_preserving);
        const double d1 = energy_drift(sys, 0.4, 2.0);
        const double d2 = energy_drift(sys, 0.2, 2.0);
        MESSAGE(to_string(method) << ": drift " << d1 << " -> " << d2 << " (ratio " << d1 / d2 << ")");
        CHECK(d1 / d2 >= 8.0);
        CHECK(d1 / d2 <= 32.0);
    }
}

TEST_CASE("breaking norm compatibility produces energy drift") {
    auto b = make_blocks(4, 26);
    auto spec = make_interface_spec(b.left, b.right, InterpolationKind::traditional, CouplingMethod::projection);
    const CoupledSystem good(b.left, b.right, spec);
    // Middle of the interface, where the pulse reaches it.
    spec.interpolation.coarse_to_fine.coeffRef(25, 12) += 1e-6;
    const CoupledSystem broken(b.left, b.right, spec);
    // Small steps so the integrator's own drift is negligible.
    const double d_good = energy_drift(good, 0.01, 2.0);
    const double d_broken = energy_drift(broken, 0.01, 2.0);
    MESSAGE("drift compatible " << d_good << ", perturbed " << d_broken);
    CHECK(d_broken > 10.0 * d_good);
}
