#pragma once

#include "qlab/group.hpp"
#include "qlab/qfock.hpp"

#include <cstdint>
#include <functional>
#include <map>

namespace qlab::gqg {

using fock::Complex;

enum class RepChoice { Trivial, Conjugation };

// Finite model of the crossed product generated by functions on a G-set X
// and the operators S_q(g (x) k) = s_q(delta_g (x) e_k) u_g.  The Hilbert
// space is spanned by keys (x, tensor word over letters (group element,
// K-index), group element), with the q-inner product on the word leg.
//
// Convention for the field operator: the deletion leg of s_q(delta_g (x) e_k)
// pairs against letters with group part g^{-1} (the delta-vector splits into
// real and imaginary parts fixed by the inverse map, so the conjugate of
// delta_g is delta_{g^{-1}}); this is what makes S_q(g)* = S_q(g^{-1}).
class CrossedProductModel {
public:
    GroupAction action;
    RepChoice rep;
    int kdim;
    int cutoff;
    double q;

    CrossedProductModel(GroupAction action, RepChoice rep, int kdim, int cutoff, double q);

    using Vec = std::map<std::uint64_t, Complex>;

    int letters() const { return action.group.order * kdim; }
    int letter(int g, int k) const { return g * kdim + k; }
    int letter_group(int l) const { return l / kdim; }
    int letter_k(int l) const { return l % kdim; }

    struct Key {
        int x;
        int g;
        fock::Word w;
    };
    std::uint64_t pack(const Key& key) const;
    Key unpack(std::uint64_t code) const;

    // cyclic vector: sum over x of (x, empty word, identity)
    Vec vacuum() const;

    // left multiplication by a function on X
    Vec apply_pointwise(const Eigen::VectorXcd& a, const Vec& v) const;
    // the covariant unitary u_h
    Vec apply_unitary(int h, const Vec& v) const;
    // field operator for a coefficient vector over letters: creation with the
    // given coefficients plus deletion pairing via the group-inverse twist
    Vec apply_field(const Eigen::VectorXcd& zeta, const Vec& v) const;
    // S_q(g (x) e_k) and its generalization to a K-coefficient vector
    Vec apply_generator(int g, int k, const Vec& v) const;
    Vec apply_generator_kvec(int g, const Eigen::VectorXcd& kvec, const Vec& v) const;

    Complex inner(const Vec& u, const Vec& v) const;
    Vec project_degree(int n, const Vec& v) const;
    Vec apply_semigroup(double t, const Vec& v) const;
    // E_A at the vector level: keep degree 0 with identity group leg
    Vec project_onto_subalgebra(const Vec& v) const;

    long basis_size() const;
    Key basis_key(long idx) const;
    long index_of(const Key& key) const;

    static Vec add(const Vec& a, const Vec& b, Complex scale = 1.0);
    static double norm_inf_diff(const Vec& a, const Vec& b);

private:
    std::vector<long> fock_offsets_;  // per-degree offsets over letter words
    long fock_size_ = 0;
};

// Dense matrix of a sparse operator, column by column over the model basis.
// Guarded: refuses models above 50,000 coordinates.
Eigen::MatrixXcd to_matrix(const CrossedProductModel& model,
                           const std::function<CrossedProductModel::Vec(
                               const CrossedProductModel::Vec&)>& op);
Eigen::MatrixXcd gram_matrix(const CrossedProductModel& model);

// Degree-zero part of S_q(g1 (x) k1) S_q(g2 (x) k2) S_q(g1^{-1} (x) k1)
// S_q(g2^{-1} (x) k2) applied to the cyclic vector; for orthogonal K-indices
// this equals q times the commutator unitary.  Throws if k1 == k2.
CrossedProductModel::Vec commutator_extraction(const CrossedProductModel& model, int g1, int g2,
                                               int k1, int k2);

// Product of generators whose group labels multiply to the identity; these
// commute with every function on X.  Throws std::domain_error otherwise.
CrossedProductModel::Vec apply_c0_element(const CrossedProductModel& model,
                                          const std::vector<int>& gs, const std::vector<int>& ks,
                                          const CrossedProductModel::Vec& v);
// max over a basis of A and the model basis of ||(x a - a x) vec||_inf
double c0_centrality_defect(const CrossedProductModel& model, const std::vector<int>& gs,
                            const std::vector<int>& ks);

// Second quantization of the K-rotation mixing index k with k + kdim/2 at
// angle theta (identity on the point and group legs); kdim must be even.
CrossedProductModel::Vec apply_k_rotation(const CrossedProductModel& doubled, double theta,
                                          const CrossedProductModel::Vec& v);
// Isometry from a model with K-dimension d into the model with K doubled to
// 2d (letters keep their index), and the compression back: words containing
// a letter with index >= d map to zero.  Both models must agree otherwise.
CrossedProductModel::Vec embed_doubled(const CrossedProductModel& small,
                                       const CrossedProductModel& doubled,
                                       const CrossedProductModel::Vec& v);
CrossedProductModel::Vec compress_doubled(const CrossedProductModel& small,
                                          const CrossedProductModel& doubled,
                                          const CrossedProductModel::Vec& v);

struct PolarReport {
    double psd_defect;         // min eigenvalue of |S| (>= -tol)
    double modulus_commute;    // ||[|S|, a]|| over a basis of A
    double covariance_defect;  // ||w a f - sigma_g(a) w f|| over a basis of A
    double support_defect;     // ||w* w - f||
};
PolarReport polar_covariance(const CrossedProductModel& model, int g, int k);

// Conditional expectation onto A of S_0(g_1) a_1 ... S_0(g_m) a_m in the free
// model, as a function on X, computed by the noncrossing pairing rule: pairs
// must carry mutually inverse group labels, counted interval-recursively.
// Throws std::domain_error unless q == 0.
Eigen::VectorXcd free_moment_nc(const GroupAction& action, const std::vector<int>& gs,
                                const std::vector<Eigen::VectorXcd>& as, double q);

// Matrix-model oracle for the same quantity: apply the word to the cyclic
// vector and compress onto the subalgebra.
Eigen::VectorXcd model_conditional_expectation(const CrossedProductModel& model,
                                               const std::vector<int>& gs,
                                               const std::vector<Eigen::VectorXcd>& as, int k);

struct GapReport {
    int fsize;
    double q;
    int cutoff;
    double lambda_min;   // smallest eigenvalue on the complement of the vacuum
    double tau_defect;   // |tau(x_g)| normalization witness
};
// Coercivity probe: T = sum over g in F of |L(x_g) - R(x_g)|^2
// with x_g = s(a_g)^2 + s(b_g)^2 - 2, a_g, b_g orthonormal across g.
GapReport spectral_gap(int fsize, double q, int cutoff);

}  // namespace qlab::gqg
