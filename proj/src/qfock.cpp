#include "qlab/qfock.hpp"

#include "qlab/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace qlab::fock {

long long guard_bytes() {
    static const long long cached = [] {
        if (const char* env = std::getenv("QFOCK_GUARD_BYTES")) {
            const long long v = std::atoll(env);
            if (v > 0) return v;
        }
        return 2LL << 30;  // 2 GiB default
    }();
    return cached;
}

void check_dense_guard(long long rows, long long cols) {
    if (rows <= 0 || cols <= 0 || rows > guard_bytes() / 16 / cols)
        throw ResourceError("dense materialization exceeds the memory guard");
}

long long truncated_basis_size(int dim, int cutoff) {
    if (dim < 1 || cutoff < 0) throw std::invalid_argument("basis: dim >= 1, cutoff >= 0 required");
    long long total = 0, pw = 1;
    for (int n = 0; n <= cutoff; ++n) {
        total += pw;
        if (pw > guard_bytes() / 16 / std::max(dim, 1)) throw ResourceError("basis size exceeds guard");
        pw *= dim;
    }
    return total;
}

FockBasis::FockBasis(int dim_, int cutoff_) : dim(dim_), cutoff(cutoff_) {
    truncated_basis_size(dim, cutoff);  // validates and guards
    offsets.assign(static_cast<size_t>(cutoff) + 2, 0);
    long pw = 1;
    for (int n = 0; n <= cutoff; ++n) {
        offsets[static_cast<size_t>(n) + 1] = offsets[static_cast<size_t>(n)] + pw;
        pw *= dim;
    }
    if (size() > guard_bytes() / 16) throw ResourceError("basis size exceeds guard");
}

int FockBasis::degree_of(long index) const {
    if (index < 0 || index >= size()) throw std::out_of_range("basis index");
    const auto it = std::upper_bound(offsets.begin(), offsets.end(), index);
    return static_cast<int>(it - offsets.begin()) - 1;
}

long FockBasis::index_of(const Word& word) const {
    const int n = static_cast<int>(word.size());
    if (n > cutoff) throw std::out_of_range("word degree exceeds cutoff");
    long idx = 0;
    for (int l : word) {
        if (l < 0 || l >= dim) throw std::out_of_range("letter out of range");
        idx = idx * dim + l;
    }
    return degree_begin(n) + idx;
}

Word FockBasis::word_at(long index) const {
    const int n = degree_of(index);
    long rest = index - degree_begin(n);
    Word w(static_cast<size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
        w[static_cast<size_t>(i)] = static_cast<int>(rest % dim);
        rest /= dim;
    }
    return w;
}

double q_inner_words(const Word& u, const Word& v, double q) {
    if (u.size() != v.size()) return 0.0;
    const int n = static_cast<int>(u.size());
    if (n == 0) return 1.0;
    // quick reject: letter multisets must match
    Word su = u, sv = v;
    std::sort(su.begin(), su.end());
    std::sort(sv.begin(), sv.end());
    if (su != sv) return 0.0;
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double total = 0.0;
    do {
        bool match = true;
        for (int i = 0; i < n && match; ++i)
            match = (u[static_cast<size_t>(perm[static_cast<size_t>(i)])] ==
                     v[static_cast<size_t>(i)]);
        if (!match) continue;
        int inv = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (perm[static_cast<size_t>(i)] > perm[static_cast<size_t>(j)]) ++inv;
        total += std::pow(q, inv);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

QGram::QGram(const FockBasis& basis, double q_) : q(q_) {
    if (q < -1.0 || q > 1.0) throw std::invalid_argument("q must lie in [-1, 1]");
    blocks.reserve(static_cast<size_t>(basis.cutoff) + 1);
    for (int n = 0; n <= basis.cutoff; ++n) {
        const long sz = basis.degree_size(n);
        check_dense_guard(sz, sz);
        Eigen::MatrixXd g(sz, sz);
        const long base = basis.degree_begin(n);
        for (long i = 0; i < sz; ++i) {
            const Word wi = basis.word_at(base + i);
            for (long j = i; j < sz; ++j) {
                const double val = q_inner_words(wi, basis.word_at(base + j), q);
                g(i, j) = val;
                g(j, i) = val;
            }
        }
        blocks.push_back(std::move(g));
    }
    if (std::abs(q) < 1.0) {
        cholesky.reserve(blocks.size());
        for (const auto& g : blocks) cholesky.emplace_back(g);
    }
}

Complex q_inner(const FockBasis& basis, const QGram& gram,
                const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
    Complex total = 0.0;
    for (int n = 0; n <= basis.cutoff; ++n) {
        const long b = basis.degree_begin(n), sz = basis.degree_size(n);
        total += u.segment(b, sz).dot(gram.blocks[static_cast<size_t>(n)] * v.segment(b, sz));
    }
    return total;
}

FockOperator identity_op(const FockBasis& basis) {
    SpMat m(basis.size(), basis.size());
    m.setIdentity();
    return {basis, std::move(m)};
}

namespace {
void check_same_basis(const FockOperator& a, const FockOperator& b) {
    if (a.basis != b.basis) throw std::invalid_argument("operators on different bases");
}
}  // namespace

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
    check_same_basis(a, b);
    return {*a.basis, SpMat(a.mat * b.mat)};
}
FockOperator operator+(const FockOperator& a, const FockOperator& b) {
    check_same_basis(a, b);
    return {*a.basis, SpMat(a.mat + b.mat)};
}
FockOperator operator-(const FockOperator& a, const FockOperator& b) {
    check_same_basis(a, b);
    return {*a.basis, SpMat(a.mat - b.mat)};
}
FockOperator operator*(Complex c, const FockOperator& a) {
    return {*a.basis, SpMat(c * a.mat)};
}

FockOperator creation(const FockBasis& basis, const Eigen::VectorXcd& h) {
    if (h.size() != basis.dim) throw std::invalid_argument("creation: vector dimension mismatch");
    std::vector<Eigen::Triplet<Complex>> trip;
    for (long idx = 0; idx < basis.size(); ++idx) {
        const int n = basis.degree_of(idx);
        if (n + 1 > basis.cutoff) continue;  // truncation: top degree maps to 0
        Word w = basis.word_at(idx);
        w.insert(w.begin(), 0);
        for (int a = 0; a < basis.dim; ++a) {
            if (h[a] == Complex(0.0)) continue;
            w[0] = a;
            trip.emplace_back(basis.index_of(w), idx, h[a]);
        }
    }
    SpMat m(basis.size(), basis.size());
    m.setFromTriplets(trip.begin(), trip.end());
    return {basis, std::move(m)};
}

namespace {
// Shared kernel: delete one letter, pairing coefficients c[letter], with the
// q-power counted from the left (creation adjoint) or right (right-handed).
FockOperator annihilation_kernel(const FockBasis& basis, const Eigen::VectorXcd& c, double q,
                                 bool from_left) {
    if (c.size() != basis.dim) throw std::invalid_argument("annihilation: vector dimension mismatch");
    std::vector<Eigen::Triplet<Complex>> trip;
    for (long idx = 1; idx < basis.size(); ++idx) {
        const Word w = basis.word_at(idx);
        const int n = static_cast<int>(w.size());
        for (int j = 0; j < n; ++j) {
            const Complex coef = c[w[static_cast<size_t>(j)]];
            if (coef == Complex(0.0)) continue;
            Word rest = w;
            rest.erase(rest.begin() + j);
            const int power = from_left ? j : (n - 1 - j);
            trip.emplace_back(basis.index_of(rest), idx, std::pow(q, power) * coef);
        }
    }
    SpMat m(basis.size(), basis.size());
    m.setFromTriplets(trip.begin(), trip.end());
    return {basis, std::move(m)};
}
}  // namespace

FockOperator annihilation(const FockBasis& basis, const Eigen::VectorXcd& h, double q) {
    return annihilation_kernel(basis, h.conjugate(), q, /*from_left=*/true);
}

FockOperator field(const FockBasis& basis, const Eigen::VectorXcd& h, double q) {
    // complex extension: creation is linear in h and the deletion part pairs
    // bilinearly, so s(h1 + i h2) = s(h1) + i s(h2) holds by construction
    return creation(basis, h) + annihilation_kernel(basis, h, q, /*from_left=*/true);
}

FockOperator right_creation(const FockBasis& basis, const Eigen::VectorXcd& h) {
    if (h.size() != basis.dim) throw std::invalid_argument("creation: vector dimension mismatch");
    std::vector<Eigen::Triplet<Complex>> trip;
    for (long idx = 0; idx < basis.size(); ++idx) {
        const int n = basis.degree_of(idx);
        if (n + 1 > basis.cutoff) continue;
        Word w = basis.word_at(idx);
        w.push_back(0);
        for (int a = 0; a < basis.dim; ++a) {
            if (h[a] == Complex(0.0)) continue;
            w.back() = a;
            trip.emplace_back(basis.index_of(w), idx, h[a]);
        }
    }
    SpMat m(basis.size(), basis.size());
    m.setFromTriplets(trip.begin(), trip.end());
    return {basis, std::move(m)};
}

FockOperator right_annihilation(const FockBasis& basis, const Eigen::VectorXcd& h, double q) {
    return annihilation_kernel(basis, h.conjugate(), q, /*from_left=*/false);
}

FockOperator right_field(const FockBasis& basis, const Eigen::VectorXcd& h, double q) {
    return right_creation(basis, h) + annihilation_kernel(basis, h, q, /*from_left=*/false);
}

FockOperator q_adjoint(const FockOperator& x, const QGram& gram) {
    if (gram.cholesky.empty())
        throw std::domain_error("q_adjoint requires |q| < 1 (positive definite Gram)");
    const FockBasis& basis = *x.basis;
    check_dense_guard(basis.size(), basis.size());
    const Eigen::MatrixXcd dense = Eigen::MatrixXcd(x.mat);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
    for (int m = 0; m <= basis.cutoff; ++m) {
        for (int n = 0; n <= basis.cutoff; ++n) {
            const long bm = basis.degree_begin(m), sm = basis.degree_size(m);
            const long bn = basis.degree_begin(n), sn = basis.degree_size(n);
            const Eigen::MatrixXcd xmn = dense.block(bm, bn, sm, sn);
            if (xmn.isZero(0.0)) continue;
            const Eigen::MatrixXcd rhs =
                xmn.adjoint() * gram.blocks[static_cast<size_t>(m)];
            const auto& llt = gram.cholesky[static_cast<size_t>(n)];
            out.block(bn, bm, sn, sm) =
                llt.solve(rhs.real()).eval().cast<Complex>() +
                Complex(0, 1) * llt.solve(rhs.imag()).eval().cast<Complex>();
        }
    }
    return {basis, out.sparseView()};
}

Complex vacuum_trace(const FockOperator& x) { return x.mat.coeff(0, 0); }

double moment_combinatorial(const std::vector<Eigen::VectorXd>& hs, double q) {
    const int m = static_cast<int>(hs.size());
    double total = 0.0;
    for_each_pair_partition(m, [&](const Partition& sigma) {
        double term = std::pow(q, static_cast<double>(crossings(sigma)));
        for (const auto& b : sigma.blocks)
            term *= hs[static_cast<size_t>(b[0]) - 1].dot(hs[static_cast<size_t>(b[1]) - 1]);
        total += term;
    });
    if (m == 0) total = 1.0;
    return total;
}

namespace {
FockOperator tensor_power_blocks(const FockBasis& basis, const Eigen::MatrixXd& v) {
    std::vector<Eigen::Triplet<Complex>> trip;
    Eigen::MatrixXd block(1, 1);
    block(0, 0) = 1.0;
    trip.emplace_back(0, 0, 1.0);
    for (int n = 1; n <= basis.cutoff; ++n) {
        const long sz = basis.degree_size(n);
        check_dense_guard(sz, sz);
        Eigen::MatrixXd next(sz, sz);
        const long prev = block.rows();
        for (int a = 0; a < basis.dim; ++a)
            for (int b = 0; b < basis.dim; ++b)
                next.block(a * prev, b * prev, prev, prev) = v(a, b) * block;
        block = std::move(next);
        const long base = basis.degree_begin(n);
        for (long i = 0; i < sz; ++i)
            for (long j = 0; j < sz; ++j)
                if (block(i, j) != 0.0) trip.emplace_back(base + i, base + j, block(i, j));
    }
    SpMat m(basis.size(), basis.size());
    m.setFromTriplets(trip.begin(), trip.end());
    return {basis, std::move(m)};
}
}  // namespace

FockOperator second_quantize_orthogonal(const FockBasis& basis, const Eigen::MatrixXd& o) {
    if (o.rows() != basis.dim || o.cols() != basis.dim)
        throw std::invalid_argument("second quantization: matrix dimension mismatch");
    if ((o * o.transpose() - Eigen::MatrixXd::Identity(o.rows(), o.rows())).norm() > 1e-9)
        throw std::domain_error("second_quantize_orthogonal: input is not orthogonal");
    return tensor_power_blocks(basis, o);
}

FockOperator second_quantize_contraction(const FockBasis& basis, const Eigen::MatrixXd& v) {
    if (v.rows() != basis.dim || v.cols() != basis.dim)
        throw std::invalid_argument("second quantization: matrix dimension mismatch");
    const double norm = v.jacobiSvd().singularValues().maxCoeff();
    if (norm > 1.0 + 1e-9)
        throw std::domain_error("second_quantize_contraction: operator norm exceeds 1");
    return tensor_power_blocks(basis, v);
}

namespace {
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}
}  // namespace

FockOperator second_quantize_contraction_dilated(const FockBasis& basis,
                                                 const Eigen::MatrixXd& v) {
    if (v.rows() != basis.dim || v.cols() != basis.dim)
        throw std::invalid_argument("second quantization: matrix dimension mismatch");
    const double norm = v.jacobiSvd().singularValues().maxCoeff();
    if (norm > 1.0 + 1e-9)
        throw std::domain_error("second_quantize_contraction: operator norm exceeds 1");
    const int d = basis.dim;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd o(2 * d, 2 * d);
    o.topLeftCorner(d, d) = v;
    o.topRightCorner(d, d) = psd_sqrt(id - v * v.transpose());
    o.bottomLeftCorner(d, d) = -psd_sqrt(id - v.transpose() * v);
    o.bottomRightCorner(d, d) = v.transpose();
    const FockBasis doubled(2 * d, basis.cutoff);
    const FockOperator big = second_quantize_orthogonal(doubled, o);
    const Eigen::SparseMatrix<double> iota = embed_into_doubled(basis, doubled);
    const SpMat iota_c = iota.cast<Complex>();
    return {basis, SpMat(iota_c.transpose() * big.mat * iota_c)};
}

FockOperator conditional_expectation(const FockBasis& basis, const Eigen::MatrixXd& p) {
    if ((p - p.transpose()).norm() > 1e-9 || (p * p - p).norm() > 1e-9)
        throw std::domain_error("conditional_expectation: input is not an orthogonal projection");
    return tensor_power_blocks(basis, p);
}

FockOperator semigroup(const FockBasis& basis, double t) {
    SpMat m(basis.size(), basis.size());
    m.reserve(Eigen::VectorXi::Constant(static_cast<int>(basis.size()), 1));
    for (long i = 0; i < basis.size(); ++i)
        m.insert(i, i) = std::exp(-t * basis.degree_of(i));
    m.makeCompressed();
    return {basis, std::move(m)};
}

FockOperator rotation_dilation(const FockBasis& doubled_basis, double theta, int d) {
    if (doubled_basis.dim != 2 * d)
        throw std::invalid_argument("rotation_dilation: basis dimension must be 2d");
    const double c = std::cos(theta), s = std::sin(theta);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd o(2 * d, 2 * d);
    o.topLeftCorner(d, d) = c * id;
    o.topRightCorner(d, d) = s * id;
    o.bottomLeftCorner(d, d) = -s * id;
    o.bottomRightCorner(d, d) = c * id;
    return second_quantize_orthogonal(doubled_basis, o);
}

FockOperator flip(const FockBasis& doubled_basis, int d) {
    if (doubled_basis.dim != 2 * d)
        throw std::invalid_argument("flip: basis dimension must be 2d");
    Eigen::MatrixXd o = Eigen::MatrixXd::Identity(2 * d, 2 * d);
    o.bottomRightCorner(d, d) *= -1.0;
    return second_quantize_orthogonal(doubled_basis, o);
}

Eigen::SparseMatrix<double> embed_into_doubled(const FockBasis& small_basis,
                                               const FockBasis& doubled_basis) {
    if (doubled_basis.dim < small_basis.dim || doubled_basis.cutoff < small_basis.cutoff)
        throw std::invalid_argument("embedding target too small");
    std::vector<Eigen::Triplet<double>> trip;
    for (long i = 0; i < small_basis.size(); ++i)
        trip.emplace_back(doubled_basis.index_of(small_basis.word_at(i)), i, 1.0);
    Eigen::SparseMatrix<double> m(doubled_basis.size(), small_basis.size());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

Eigen::MatrixXcd to_dense(const FockOperator& x) {
    check_dense_guard(x.basis->size(), x.basis->size());
    return Eigen::MatrixXcd(x.mat);
}

}  // namespace qlab::fock
