#pragma once

#include "qlab/partitions.hpp"
#include "qlab/qfock.hpp"

namespace qlab::wick {

using fock::Complex;
using fock::FockBasis;
using fock::FockOperator;

// The unique algebra element W with W(xi) Omega = xi, built degree by degree
// from the recursion W(e_a (x) w) = s(e_a) W(w) - W(lower-degree remainder).
// xi may mix degrees (the map is linear).  Throws std::domain_error when the
// top degree of xi exceeds cutoff - margin.
FockOperator wick_word(const FockBasis& basis, double q, const Eigen::VectorXcd& xi,
                       int margin = 0);

// Pairing coefficient q^{crossings} times the product of inner products over
// the pair blocks of a pair/singleton partition.
double f_sigma(const Partition& sigma, const std::vector<Eigen::VectorXd>& hs, double q);

struct ExpansionTerm {
    Complex coeff;
    long word_index;  // reduced tensor word in the ambient basis
};

// Convolution expansion of W(xi) W(eta) for homogeneous xi (degree m) and eta
// (degree m'): sum over pairings that only match xi-legs with eta-legs, each
// contributing f_sigma times the reduced word of surviving legs.  Terms are
// aggregated per reduced word.
std::vector<ExpansionTerm> wick_product_expansion(const FockBasis& basis, double q,
                                                  const Eigen::VectorXcd& xi,
                                                  const Eigen::VectorXcd& eta);

Eigen::VectorXcd aggregate_expansion(const FockBasis& basis,
                                     const std::vector<ExpansionTerm>& terms);

// Ambient vector h (x) e_j inside the n-fold replicated space of dimension
// base_dim * n (copy-major layout: letter = j * base_dim + i).
Eigen::VectorXcd replica_vector(const Eigen::VectorXd& h, int copy, int base_dim, int n);

// Replica average embedding applied to a word of field operators:
// the product over i of n^{-1/2} sum_j s(h_i (x) e_j) on the replicated basis.
FockOperator un_embed(const FockBasis& replicated, double q,
                      const std::vector<Eigen::VectorXd>& hs, int base_dim, int n);

// The surrogate word x_sigma^n = n^{-m/2} sum over color tuples with
// coincidence pattern sigma of s(h_1 (x) e_{j_1}) ... s(h_m (x) e_{j_m}).
FockOperator x_sigma_n(const FockBasis& replicated, double q, const Partition& sigma,
                       const std::vector<Eigen::VectorXd>& hs, int base_dim, int n);

// ||x_sigma^n||_4^4 = tau((x* x)^2) computed purely combinatorially: sum over
// color-coincidence patterns of the four factors, weighted by falling
// factorials of n, of pair-partition sums restricted to color-compatible
// pairings.  Exact (up to float) for every n.
double sigma_word_norm4(const Partition& sigma, const std::vector<Eigen::VectorXd>& hs,
                        double q, long n);

// Least-squares slope of log ||x_sigma^n||_4 against log n over the given n.
double decay_probe(const Partition& sigma, const std::vector<Eigen::VectorXd>& hs, double q,
                   const std::vector<long>& ns);

// Verifies that the number semigroup scales the singleton-reduced Wick word
// of a pair/singleton pattern by exp(-t * #singletons) on the vacuum vector.
bool eigenvector_check(const FockBasis& basis, double q, const Partition& sigma,
                       const std::vector<Eigen::VectorXd>& hs, double t, double tol = 1e-12);

}  // namespace qlab::wick
