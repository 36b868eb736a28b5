#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <stdexcept>
#include <vector>

namespace qlab::fock {

using Complex = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Complex>;
using Word = std::vector<int>;  // letters in 0..dim-1; size = tensor degree

// Thrown when a construction would exceed the configured memory budget.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Memory budget in bytes for dense materializations; overridable via the
// QFOCK_GUARD_BYTES environment variable.
long long guard_bytes();
void check_dense_guard(long long rows, long long cols);

long long truncated_basis_size(int dim, int cutoff);

// Enumeration of all tensor words of degree 0..cutoff over letters 0..dim-1,
// grouped by degree; within a degree, words are ordered with the first letter
// most significant.  Index 0 is the vacuum.
struct FockBasis {
    int dim;
    int cutoff;
    std::vector<long> offsets;  // offsets[n] = first index of degree n; size cutoff+2

    FockBasis(int dim, int cutoff);
    long size() const { return offsets.back(); }
    long degree_begin(int n) const { return offsets[static_cast<size_t>(n)]; }
    long degree_size(int n) const {
        return offsets[static_cast<size_t>(n) + 1] - offsets[static_cast<size_t>(n)];
    }
    int degree_of(long index) const;
    long index_of(const Word& word) const;
    Word word_at(long index) const;
};

// Sum over S_n of q^{inversions} times the letter-matching product for two
// words of equal degree over an orthonormal alphabet.
double q_inner_words(const Word& u, const Word& v, double q);

// Per-degree Gram matrices of the q-inner product, with cached Cholesky
// factors for |q| < 1 (used for adjoints and generalized eigenproblems).
struct QGram {
    double q;
    std::vector<Eigen::MatrixXd> blocks;               // blocks[n] over degree-n words
    std::vector<Eigen::LLT<Eigen::MatrixXd>> cholesky;  // empty unless |q| < 1

    QGram(const FockBasis& basis, double q);
};

// Degreewise q-inner product of coefficient vectors (distinct degrees are
// orthogonal).  Conjugate-linear in u.
Complex q_inner(const FockBasis& basis, const QGram& gram,
                const Eigen::VectorXcd& u, const Eigen::VectorXcd& v);

struct FockOperator {
    const FockBasis* basis = nullptr;
    SpMat mat;

    FockOperator() = default;
    FockOperator(const FockBasis& b, SpMat m) : basis(&b), mat(std::move(m)) {}
};

FockOperator identity_op(const FockBasis& basis);
FockOperator operator*(const FockOperator& a, const FockOperator& b);
FockOperator operator+(const FockOperator& a, const FockOperator& b);
FockOperator operator-(const FockOperator& a, const FockOperator& b);
FockOperator operator*(Complex c, const FockOperator& a);

// Creation: prepend h; words of top degree map to 0 (truncation convention).
FockOperator creation(const FockBasis& basis, const Eigen::VectorXcd& h);

// Annihilation l(h)* for the q-inner product: word w of degree n maps to
// sum_j q^{j-1} conj(h[w_j]) (w with position j removed).
FockOperator annihilation(const FockBasis& basis, const Eigen::VectorXcd& h, double q);

// Field operator s(h) = l(h) + l(h)*.  For complex h this is the complex
// extension s(h1 + i h2) = s(h1) + i s(h2), i.e. creation(h) plus the
// annihilation that pairs bilinearly with h.
FockOperator field(const FockBasis& basis, const Eigen::VectorXcd& h, double q);

// Right-handed analogues (append / delete counting positions from the right),
// realizing multiplication from the right on vacuum vectors.
FockOperator right_creation(const FockBasis& basis, const Eigen::VectorXcd& h);
FockOperator right_annihilation(const FockBasis& basis, const Eigen::VectorXcd& h, double q);
FockOperator right_field(const FockBasis& basis, const Eigen::VectorXcd& h, double q);

// Adjoint with respect to the q-inner product: per degree pair,
// (X*)_{n<-m} = G_n^{-1} (X_{m<-n})^H G_m.
FockOperator q_adjoint(const FockOperator& x, const QGram& gram);

Complex vacuum_trace(const FockOperator& x);

// Pair-partition moment sum: sum over full pairings of q^{crossings} times
// the product of pairwise inner products.  Zero for odd length.
double moment_combinatorial(const std::vector<Eigen::VectorXd>& hs, double q);

// Second quantization: degree-n block acts as the n-th tensor power.
FockOperator second_quantize_orthogonal(const FockBasis& basis, const Eigen::MatrixXd& o);
FockOperator second_quantize_contraction(const FockBasis& basis, const Eigen::MatrixXd& v);
// Same map computed through the 2x2 block unitary dilation on a doubled
// ambient space followed by compression; used as a cross-check oracle.
FockOperator second_quantize_contraction_dilated(const FockBasis& basis,
                                                 const Eigen::MatrixXd& v);
FockOperator conditional_expectation(const FockBasis& basis, const Eigen::MatrixXd& p);

// Number-operator semigroup: e^{-t n} on the degree-n block, exactly diagonal.
FockOperator semigroup(const FockBasis& basis, double t);

// Rotation on a doubled ambient space (dimension 2d): the second quantization
// of [[cos I, sin I], [-sin I, cos I]].  flip negates the second summand.
FockOperator rotation_dilation(const FockBasis& doubled_basis, double theta, int d);
FockOperator flip(const FockBasis& doubled_basis, int d);

// Isometry from the d-dimensional basis into the first summand of the
// doubled basis, and the compression back (letters >= d are dropped).
Eigen::SparseMatrix<double> embed_into_doubled(const FockBasis& small_basis,
                                               const FockBasis& doubled_basis);

Eigen::MatrixXcd to_dense(const FockOperator& x);

}  // namespace qlab::fock
