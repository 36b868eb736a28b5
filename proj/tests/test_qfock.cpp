#include "doctest.h"
#include "qlab/partitions.hpp"
#include "qlab/qfock.hpp"

#include <cmath>
#include <random>

using namespace qlab;
using namespace qlab::fock;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

VectorXcd unit(int d, int i) {
    VectorXcd v = VectorXcd::Zero(d);
    v[i] = 1.0;
    return v;
}

VectorXcd basis_vec(const FockBasis& b, long i) {
    VectorXcd v = VectorXcd::Zero(b.size());
    v[i] = 1.0;
    return v;
}

MatrixXd random_orthogonal(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = gauss(rng);
    Eigen::HouseholderQR<MatrixXd> qr(a);
    MatrixXd q = qr.householderQ();
    // fix signs so the factorization is a proper draw
    MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i)
        if (r(i, i) < 0) q.col(i) *= -1.0;
    return q;
}

long catalan(int k) {
    long c = 1;
    for (int i = 0; i < k; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
    return c;
}

}  // namespace

TEST_CASE("basis enumeration: sizes, grouping, index round-trip") {
    FockBasis b(3, 4);
    CHECK(b.size() == 1 + 3 + 9 + 27 + 81);
    CHECK(b.degree_of(0) == 0);
    CHECK(b.degree_begin(2) == 4);
    for (long i = 0; i < b.size(); ++i) {
        const Word w = b.word_at(i);
        CHECK(b.index_of(w) == i);
        CHECK(static_cast<int>(w.size()) == b.degree_of(i));
    }
}

TEST_CASE("q-inner product of words: fixed values") {
    // unit letter against itself
    CHECK(q_inner_words({0}, {0}, 0.7) == doctest::Approx(1.0));
    // orthonormal pair swapped: only the transposition matches, weight q
    CHECK(q_inner_words({0, 1}, {1, 0}, 0.7) == doctest::Approx(0.7));
    // repeated letter: identity and transposition both match
    CHECK(q_inner_words({0, 0}, {0, 0}, 0.7) == doctest::Approx(1.7));
    CHECK(q_inner_words({0, 1}, {0, 0}, 0.7) == doctest::Approx(0.0));
}

TEST_CASE("gram blocks: n=2, d=2 closed form") {
    const double q = -0.4;
    FockBasis b(2, 2);
    QGram g(b, q);
    CHECK(g.blocks[0](0, 0) == doctest::Approx(1.0));
    CHECK(g.blocks[1].isApprox(MatrixXd::Identity(2, 2)));
    const MatrixXd& g2 = g.blocks[2];
    // word order: 00, 01, 10, 11
    CHECK(g2(0, 0) == doctest::Approx(1 + q));
    CHECK(g2(1, 1) == doctest::Approx(1.0));
    CHECK(g2(2, 2) == doctest::Approx(1.0));
    CHECK(g2(3, 3) == doctest::Approx(1 + q));
    CHECK(g2(1, 2) == doctest::Approx(q));
    CHECK(g2(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("gram positivity for n <= 5, d <= 3, q = +/-0.9") {
    for (int d : {1, 2, 3}) {
        for (double q : {0.9, -0.9}) {
            FockBasis b(d, 5);
            QGram g(b, q);
            for (int n = 0; n <= 5; ++n) {
                Eigen::SelfAdjointEigenSolver<MatrixXd> es(g.blocks[static_cast<size_t>(n)]);
                CHECK(es.eigenvalues().minCoeff() >= -1e-12);
            }
        }
    }
}

TEST_CASE("creation and annihilation: formula values") {
    const double q = 0.6;
    FockBasis b(2, 3);
    const VectorXcd h = unit(2, 0), k = unit(2, 1);

    auto l = creation(b, h);
    CHECK((l.mat * basis_vec(b, 0) - basis_vec(b, b.index_of({0}))).norm() == doctest::Approx(0.0));
    CHECK((l.mat * basis_vec(b, b.index_of({1})) - basis_vec(b, b.index_of({0, 1}))).norm() ==
          doctest::Approx(0.0));
    // top-degree word maps to 0
    CHECK((l.mat * basis_vec(b, b.index_of({1, 1, 1}))).norm() == doctest::Approx(0.0));

    auto ls = annihilation(b, h, q);
    CHECK((ls.mat * basis_vec(b, 0)).norm() == doctest::Approx(0.0));
    CHECK((ls.mat * basis_vec(b, b.index_of({0})) - basis_vec(b, 0)).norm() ==
          doctest::Approx(0.0));
    // delete the second letter: weight q^1
    VectorXcd got = ls.mat * basis_vec(b, b.index_of({1, 0}));
    CHECK((got - q * basis_vec(b, b.index_of({1}))).norm() == doctest::Approx(0.0));
}

TEST_CASE("annihilation is the q-adjoint of creation") {
    for (double q : {0.0, 0.5, -0.8}) {
        FockBasis b(2, 3);
        QGram g(b, q);
        std::mt19937_64 rng(11);
        std::normal_distribution<double> gauss;
        VectorXcd h(2);
        h << Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng));
        auto lstar = q_adjoint(creation(b, h), g);
        auto direct = annihilation(b, h, q);
        CHECK((MatrixXcd(lstar.mat) - MatrixXcd(direct.mat)).norm() < 1e-10);
    }
}

TEST_CASE("q-commutation relation on vectors of degree <= N-1") {
    for (double q : {0.7, -0.7}) {
        FockBasis b(3, 4);
        for (int fi = 0; fi < 3; ++fi) {
            for (int gi = 0; gi < 3; ++gi) {
                auto rel = annihilation(b, unit(3, fi), q) * creation(b, unit(3, gi)) -
                           Complex(q) * (creation(b, unit(3, gi)) * annihilation(b, unit(3, fi), q));
                const double expect = fi == gi ? 1.0 : 0.0;
                for (long idx = 0; idx < b.degree_begin(4); ++idx) {  // degree <= N-1
                    VectorXcd xi = basis_vec(b, idx);
                    CHECK((rel.mat * xi - expect * xi).norm() <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("field operator: vacuum action and complex extension") {
    const double q = 0.3;
    FockBasis b(2, 3);
    const VectorXcd h = unit(2, 0);
    auto s = field(b, h, q);
    CHECK((s.mat * basis_vec(b, 0) - basis_vec(b, b.index_of({0}))).norm() == doctest::Approx(0.0));
    // s(h) h = h(x)h + vacuum
    VectorXcd got = s.mat * basis_vec(b, b.index_of({0}));
    CHECK((got - basis_vec(b, b.index_of({0, 0})) - basis_vec(b, 0)).norm() ==
          doctest::Approx(0.0));
    // complex extension is matrix-linear
    const VectorXcd h2 = unit(2, 1);
    auto lhs = field(b, h + Complex(0, 1) * h2, q);
    auto rhs = field(b, h, q) + Complex(0, 1) * field(b, h2, q);
    CHECK((MatrixXcd(lhs.mat) - MatrixXcd(rhs.mat)).norm() < 1e-14);
}

TEST_CASE("field self-adjointness under the q-gram adjoint") {
    for (double q : {0.0, 0.5, -0.6}) {
        FockBasis b(2, 4);
        QGram g(b, q);
        VectorXcd h(2);
        h << 0.8, -0.6;
        auto s = field(b, h, q);
        CHECK((MatrixXcd(q_adjoint(s, g).mat) - MatrixXcd(s.mat)).norm() < 1e-10);
    }
}

TEST_CASE("vacuum trace special values") {
    const double q = 0.37;
    FockBasis b(1, 8);
    auto s = field(b, unit(1, 0), q);
    CHECK(std::abs(vacuum_trace(identity_op(b)) - 1.0) < 1e-14);
    CHECK(std::abs(vacuum_trace(s * s) - 1.0) < 1e-12);
    CHECK(std::abs(vacuum_trace(s * s * s * s) - (2.0 + q)) < 1e-12);
    // q=0 even moments are Catalan numbers
    FockBasis b0(1, 8);
    auto s0 = field(b0, unit(1, 0), 0.0);
    FockOperator pw = identity_op(b0);
    for (int k = 1; k <= 4; ++k) {
        pw = pw * (s0 * s0);
        CHECK(std::abs(vacuum_trace(pw) - static_cast<double>(catalan(k))) < 1e-10);
    }
}

TEST_CASE("pair-partition moment sum equals vacuum trace for all short words") {
    FockBasis b(2, 6);
    std::vector<VectorXd> e = {VectorXd::Zero(2), VectorXd::Zero(2)};
    e[0][0] = 1.0;
    e[1][1] = 1.0;
    for (double q : {-0.5, 0.0, 0.5}) {
        std::vector<FockOperator> s = {field(b, e[0].cast<Complex>(), q),
                                       field(b, e[1].cast<Complex>(), q)};
        for (int m = 0; m <= 6; ++m) {
            for (long code = 0; code < (1L << m); ++code) {
                std::vector<VectorXd> hs;
                FockOperator prod = identity_op(b);
                for (int i = 0; i < m; ++i) {
                    const int letter = static_cast<int>((code >> i) & 1);
                    hs.push_back(e[static_cast<size_t>(letter)]);
                    prod = prod * s[static_cast<size_t>(letter)];
                }
                const double expect = moment_combinatorial(hs, q);
                CHECK(std::abs(vacuum_trace(prod).real() - expect) <= 1e-10);
                CHECK(std::abs(vacuum_trace(prod).imag()) <= 1e-12);
            }
        }
    }
}

TEST_CASE("moment_combinatorial allows q=1 (classical endpoint)") {
    // all moments of a standard Gaussian: (2k-1)!!
    std::vector<VectorXd> hs(6, VectorXd::Ones(1));
    CHECK(moment_combinatorial(hs, 1.0) == doctest::Approx(15.0));
}

TEST_CASE("second quantization of orthogonal maps") {
    FockBasis b(3, 3);
    CHECK((MatrixXcd(second_quantize_orthogonal(b, MatrixXd::Identity(3, 3)).mat) -
           MatrixXcd::Identity(b.size(), b.size()))
              .norm() < 1e-14);
    // -id scales degree n by (-1)^n
    auto neg = second_quantize_orthogonal(b, -MatrixXd::Identity(3, 3));
    for (long i = 0; i < b.size(); ++i)
        CHECK(std::abs(neg.mat.coeff(i, i) - Complex(std::pow(-1.0, b.degree_of(i)))) < 1e-14);
    CHECK_THROWS_AS(second_quantize_orthogonal(b, 2.0 * MatrixXd::Identity(3, 3)),
                    std::domain_error);
}

TEST_CASE("second quantization functoriality for random orthogonal pairs") {
    std::mt19937_64 rng(2024);
    for (int d : {2, 3}) {
        FockBasis b(d, 3);
        for (int trial = 0; trial < 5; ++trial) {
            MatrixXd o1 = random_orthogonal(d, rng);
            MatrixXd o2 = random_orthogonal(d, rng);
            auto lhs = second_quantize_orthogonal(b, o1 * o2);
            auto rhs = second_quantize_orthogonal(b, o1) * second_quantize_orthogonal(b, o2);
            CHECK((MatrixXcd(lhs.mat) - MatrixXcd(rhs.mat)).norm() < 1e-10);
        }
    }
}

TEST_CASE("contraction: tensor-power route equals dilation-compression route") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int d : {2, 3}) {
        FockBasis b(d, 3);
        for (int trial = 0; trial < 4; ++trial) {
            MatrixXd v(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) v(i, j) = u(rng);
            v /= (v.jacobiSvd().singularValues().maxCoeff() + 0.25);  // force a strict contraction
            auto direct = second_quantize_contraction(b, v);
            auto dilated = second_quantize_contraction_dilated(b, v);
            CHECK((MatrixXcd(direct.mat) - MatrixXcd(dilated.mat)).norm() < 1e-10);
        }
    }
    FockBasis b2(2, 2);
    CHECK_THROWS_AS(second_quantize_contraction(b2, 1.5 * MatrixXd::Identity(2, 2)),
                    std::domain_error);
    // v = 0 is the vacuum projection
    auto vac = second_quantize_contraction(b2, MatrixXd::Zero(2, 2));
    CHECK(std::abs(vac.mat.coeff(0, 0) - Complex(1.0)) < 1e-14);
    CHECK(MatrixXcd(vac.mat).norm() == doctest::Approx(1.0));
}

TEST_CASE("conditional expectation: projection validation and functoriality") {
    FockBasis b(2, 3);
    MatrixXd p = MatrixXd::Zero(2, 2);
    p(0, 0) = 1.0;
    auto e = conditional_expectation(b, p);
    // E(s(h)) = s(P h) on the first-degree block
    const double q = 0.4;
    VectorXcd h(2);
    h << 0.6, 0.8;
    VectorXcd ph = p.cast<Complex>() * h;
    auto lhs = FockOperator(b, SpMat(e.mat * field(b, h, q).mat * e.mat));
    auto rhs = FockOperator(b, SpMat(e.mat * field(b, ph, q).mat * e.mat));
    CHECK((MatrixXcd(lhs.mat) - MatrixXcd(rhs.mat)).norm() < 1e-12);
    CHECK_THROWS_AS(conditional_expectation(b, 0.5 * MatrixXd::Identity(2, 2)),
                    std::domain_error);
    // trace preservation: tau(E(x)) = tau(x) for a sample x
    auto x = field(b, h, q) * field(b, unit(2, 1), q);
    CHECK(std::abs(vacuum_trace(FockOperator(b, SpMat(e.mat * x.mat * e.mat))) -
                   vacuum_trace(x)) < 1e-12);
}

TEST_CASE("semigroup: eigenvalues and the semigroup law") {
    FockBasis b(2, 4);
    auto t1 = semigroup(b, 0.3), t2 = semigroup(b, 0.9), t3 = semigroup(b, 1.2);
    CHECK((MatrixXcd(t1.mat * t2.mat) - MatrixXcd(t3.mat)).norm() < 1e-14);
    for (long i = 0; i < b.size(); ++i)
        CHECK(std::abs(t1.mat.coeff(i, i) - Complex(std::exp(-0.3 * b.degree_of(i)))) < 1e-15);
    // T_t = second quantization of e^{-t} id
    auto via_contraction = second_quantize_contraction(b, std::exp(-0.3) * MatrixXd::Identity(2, 2));
    CHECK((MatrixXcd(t1.mat) - MatrixXcd(via_contraction.mat)).norm() < 1e-12);
}

TEST_CASE("rotation dilation compresses to the number semigroup") {
    const int d = 2;
    FockBasis small(d, 4), doubled(2 * d, 4);
    for (double theta : {0.0, 0.4, 1.1}) {
        auto alpha = rotation_dilation(doubled, theta, d);
        const Eigen::SparseMatrix<double> iota = embed_into_doubled(small, doubled);
        const SpMat iota_c = iota.cast<Complex>();
        MatrixXcd compressed = MatrixXcd(SpMat(iota_c.transpose() * alpha.mat * iota_c));
        const double t = -std::log(std::cos(theta));
        MatrixXcd expected = MatrixXcd(semigroup(small, t).mat);
        CHECK((compressed - expected).norm() < 1e-10);
    }
}

TEST_CASE("flip conjugation reverses the rotation") {
    const int d = 2;
    FockBasis doubled(2 * d, 3);
    const double theta = 0.7;
    auto alpha = rotation_dilation(doubled, theta, d);
    auto alpha_neg = rotation_dilation(doubled, -theta, d);
    auto beta = flip(doubled, d);
    CHECK((MatrixXcd(SpMat(beta.mat * alpha.mat * beta.mat)) - MatrixXcd(alpha_neg.mat)).norm() <
          1e-12);
}

TEST_CASE("right field operators: adjoint consistency and commutation with left fields") {
    const double q = 0.5;
    FockBasis b(2, 4);
    QGram g(b, q);
    VectorXcd h(2), k(2);
    h << 1.0, 0.0;
    k << 0.3, std::sqrt(1 - 0.09);
    auto rs = right_field(b, h, q);
    CHECK((MatrixXcd(q_adjoint(rs, g).mat) - MatrixXcd(rs.mat)).norm() < 1e-10);
    // left and right fields commute on vectors of degree <= N-2
    auto comm = field(b, k, q) * rs - rs * field(b, k, q);
    for (long i = 0; i < b.degree_begin(3); ++i)
        CHECK((comm.mat * basis_vec(b, i)).norm() < 1e-12);
    // right multiplication matches left multiplication on the vacuum
    CHECK((rs.mat * basis_vec(b, 0) - field(b, h, q).mat * basis_vec(b, 0)).norm() < 1e-14);
}

TEST_CASE("memory guard rejects oversized dense requests") {
    CHECK_THROWS_AS(check_dense_guard(1 << 20, 1 << 20), ResourceError);
    CHECK_THROWS_AS(FockBasis(10, 12), ResourceError);
}
