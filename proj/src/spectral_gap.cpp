#include "qlab/gqg.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace qlab::gqg {

GapReport spectral_gap(int fsize, double q, int cutoff) {
    if (fsize <= 0) throw std::invalid_argument("spectral_gap: fsize must be positive");
    if (std::abs(q) >= 1.0) throw std::invalid_argument("spectral_gap: |q| < 1 required");
    if (cutoff < 3)
        throw std::invalid_argument("spectral_gap: cutoff >= 3 required (degree margin)");
    using namespace fock;
    const int d = 2 * fsize;  // orthonormal pair (a_g, b_g) per generator
    const FockBasis basis(d, cutoff);
    check_dense_guard(basis.size(), basis.size());
    const QGram gram(basis, q);

    const FockOperator id = identity_op(basis);
    FockOperator total = 0.0 * id;
    double tau_defect = 0.0;
    for (int g = 0; g < fsize; ++g) {
        Eigen::VectorXcd a = Eigen::VectorXcd::Zero(d), b = Eigen::VectorXcd::Zero(d);
        a(2 * g) = 1.0;
        b(2 * g + 1) = 1.0;
        const FockOperator sa = field(basis, a, q), sb = field(basis, b, q);
        const FockOperator left = sa * sa + sb * sb - 2.0 * id;
        const FockOperator ra = right_field(basis, a, q), rb = right_field(basis, b, q);
        const FockOperator right = ra * ra + rb * rb - 2.0 * id;
        const FockOperator diff = left - right;
        total = total + q_adjoint(diff, gram) * diff;
        tau_defect = std::max(tau_defect, std::abs(vacuum_trace(left)));
    }

    // generalized Rayleigh quotient <v, T v>_q / <v, v>_q with the inner
    // product matrix G, restricted to vacuum-orthogonal vectors of degree at
    // most cutoff-2: there (L-R)v lives strictly below the cutoff, so the
    // quadratic form carries no truncation error
    const long n = basis.size();
    Eigen::MatrixXd gfull = Eigen::MatrixXd::Zero(n, n);
    for (int deg = 0; deg <= cutoff; ++deg)
        gfull.block(basis.degree_begin(deg), basis.degree_begin(deg), basis.degree_size(deg),
                    basis.degree_size(deg)) = gram.blocks[static_cast<size_t>(deg)];
    const Eigen::MatrixXd gt = (gfull * to_dense(total).real()).eval();
    const Eigen::MatrixXd sym = 0.5 * (gt + gt.transpose());
    const long lo = 1;  // skip the vacuum
    const long hi = basis.degree_begin(cutoff - 2) + basis.degree_size(cutoff - 2);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        sym.block(lo, lo, hi - lo, hi - lo), gfull.block(lo, lo, hi - lo, hi - lo));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("spectral_gap: eigensolver failed");

    GapReport rep{};
    rep.fsize = fsize;
    rep.q = q;
    rep.cutoff = cutoff;
    rep.lambda_min = es.eigenvalues().minCoeff();
    rep.tau_defect = tau_defect;
    return rep;
}

}  // namespace qlab::gqg
