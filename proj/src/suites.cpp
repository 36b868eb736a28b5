#include "qlab/suites.hpp"

#include "qlab/gqg.hpp"
#include "qlab/partitions.hpp"
#include "qlab/qfock.hpp"
#include "qlab/rigidity.hpp"
#include "qlab/wick.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

namespace qlab::suites {

namespace {

using fock::FockBasis;
using fock::FockOperator;
using fock::QGram;

std::uint64_t splitmix(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
}

double gaussian(std::uint64_t& state) {
    const double u = std::max(uniform01(state), 1e-300);
    const double v = uniform01(state);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

Eigen::MatrixXd random_orthogonal(int d, std::uint64_t& state) {
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = gaussian(state);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
}

double max_abs(const FockOperator& x) {
    return Eigen::MatrixXcd(x.mat).cwiseAbs().maxCoeff();
}

Record make(std::string name, std::string ref, double expected, double actual, double tol) {
    Record r;
    r.name = std::move(name);
    r.ref = std::move(ref);
    r.expected = expected;
    r.actual = actual;
    r.tolerance = tol;
    r.pass = std::abs(actual - expected) <= tol;
    return r;
}

Eigen::VectorXcd unit(int dim, int k) {
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(dim);
    h(k) = 1.0;
    return h;
}

Eigen::VectorXd runit(int dim, int k) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(dim);
    h(k) = 1.0;
    return h;
}

using RecordBatch = std::vector<Record>;

Report assemble(std::string suite, std::uint64_t seed,
                std::vector<std::pair<std::string, std::string>> config,
                std::vector<std::future<RecordBatch>> futures) {
    Report rep;
    rep.suite = std::move(suite);
    rep.seed = seed;
    rep.config = std::move(config);
    for (auto& f : futures)
        for (auto& r : f.get()) rep.records.push_back(std::move(r));
    std::sort(rep.records.begin(), rep.records.end(),
              [](const Record& a, const Record& b) { return a.name < b.name; });
    return rep;
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

bool Report::pass() const {
    return std::all_of(records.begin(), records.end(), [](const Record& r) { return r.pass; });
}

std::string Report::to_json(double wall_seconds) const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["version"] = kVersion;
    j["suite"] = suite;
    j["seed"] = seed;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    j["pass"] = pass();
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json e;
        e["name"] = r.name;
        e["ref"] = r.ref;
        e["expected"] = r.expected;
        e["actual"] = r.actual;
        e["tolerance"] = r.tolerance;
        e["pass"] = r.pass;
        recs.push_back(e);
    }
    j["records"] = recs;
    if (wall_seconds >= 0.0) j["wall_seconds"] = wall_seconds;
    return j.dump(2) + "\n";
}

std::string Report::to_csv() const {
    std::ostringstream out;
    out << "suite,name,ref,expected,actual,tolerance,pass\n";
    for (const auto& r : records)
        out << suite << "," << r.name << "," << r.ref << "," << fmt(r.expected) << ","
            << fmt(r.actual) << "," << fmt(r.tolerance) << "," << (r.pass ? "true" : "false")
            << "\n";
    return out.str();
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& label) {
    std::uint64_t state = master ^ 0x517cc1b727220a95ULL;
    for (const char c : label) {
        state ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        (void)splitmix(state);
    }
    return splitmix(state);
}

Report suite_fock(double q, int dim, int cutoff, std::uint64_t seed) {
    std::vector<std::future<RecordBatch>> futures;

    futures.push_back(std::async(std::launch::async, [q]() -> RecordBatch {
        // vacuum-state route against the pairing sum for all short words
        const FockBasis basis(2, 6);
        std::vector<FockOperator> s = {fock::field(basis, unit(2, 0), q),
                                       fock::field(basis, unit(2, 1), q)};
        double worst = 0.0;
        for (int len = 1; len <= 6; ++len)
            for (int bits = 0; bits < (1 << len); ++bits) {
                FockOperator prod = fock::identity_op(basis);
                std::vector<Eigen::VectorXd> hs;
                for (int pos = 0; pos < len; ++pos) {
                    const int letter = (bits >> pos) & 1;
                    prod = prod * s[static_cast<size_t>(letter)];
                    hs.push_back(runit(2, letter));
                }
                worst = std::max(worst, std::abs(fock::vacuum_trace(prod).real() -
                                                 fock::moment_combinatorial(hs, q)));
            }
        return {make("moments-pairing-sum", "moments.pairing-sum", 0.0, worst, 1e-10)};
    }));

    futures.push_back(std::async(std::launch::async, [q]() -> RecordBatch {
        const FockBasis basis(2, 4);
        const FockOperator s = fock::field(basis, unit(2, 0), q);
        const double m4 = fock::vacuum_trace(s * s * s * s).real();
        RecordBatch out = {
            make("moments-fourth-value", "moments.fourth-value", 2.0 + q, m4, 1e-10)};
        const FockBasis big(2, 8);
        const FockOperator t = fock::field(big, unit(2, 0), 0.0);
        const double catalan[5] = {1, 1, 2, 5, 14};
        double worst = 0.0;
        FockOperator pow = fock::identity_op(big);
        for (int k = 1; k <= 4; ++k) {
            pow = pow * t * t;
            worst = std::max(worst,
                             std::abs(fock::vacuum_trace(pow).real() - catalan[k]));
        }
        out.push_back(make("moments-free-catalan", "moments.free-catalan", 0.0, worst, 1e-10));
        return out;
    }));

    futures.push_back(std::async(std::launch::async, [q]() -> RecordBatch {
        // deformed commutation relation on vectors below the cutoff
        const FockBasis basis(3, 4);
        double worst = 0.0;
        for (int f = 0; f < 3; ++f)
            for (int g = 0; g < 3; ++g) {
                const FockOperator lf = fock::creation(basis, unit(3, f));
                const FockOperator lg = fock::creation(basis, unit(3, g));
                const FockOperator af = fock::annihilation(basis, unit(3, f), q);
                FockOperator d = af * lg - q * (lg * af);
                if (f == g) d = d - fock::identity_op(basis);
                const Eigen::MatrixXcd dd = fock::to_dense(d);
                worst = std::max(
                    worst, dd.leftCols(basis.degree_begin(3) + basis.degree_size(3))
                               .cwiseAbs()
                               .maxCoeff());
            }
        return {make("relation-deformed-commutation", "fock.relation", 0.0, worst, 1e-12)};
    }));

    futures.push_back(std::async(std::launch::async, []() -> RecordBatch {
        double violation = 0.0;
        for (const double qq : {0.9, -0.9})
            for (int d = 1; d <= 3; ++d) {
                const FockBasis basis(d, 5);
                const QGram gram(basis, qq);
                for (int n = 0; n <= 5; ++n) {
                    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                        gram.blocks[static_cast<size_t>(n)]);
                    violation = std::max(violation, std::max(0.0, -es.eigenvalues().minCoeff()));
                }
            }
        return {make("gram-positivity", "fock.gram-positive", 0.0, violation, 1e-12)};
    }));

    futures.push_back(std::async(std::launch::async, [seed]() -> RecordBatch {
        std::uint64_t state = derive_seed(seed, "functoriality");
        const FockBasis basis(3, 3);
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::MatrixXd o1 = random_orthogonal(3, state);
            const Eigen::MatrixXd o2 = random_orthogonal(3, state);
            const FockOperator lhs = fock::second_quantize_orthogonal(basis, o1 * o2);
            const FockOperator rhs = fock::second_quantize_orthogonal(basis, o1) *
                                     fock::second_quantize_orthogonal(basis, o2);
            worst = std::max(worst, max_abs(lhs - rhs));
        }
        return {make("second-quantization-functorial", "fock.functorial", 0.0, worst, 1e-10)};
    }));

    futures.push_back(std::async(std::launch::async, [seed]() -> RecordBatch {
        std::uint64_t state = derive_seed(seed, "contraction");
        const FockBasis basis(2, 3);
        double worst = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            Eigen::MatrixXd v(2, 2);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) v(i, j) = gaussian(state);
            v /= (v.norm() + 1.0);  // strict contraction
            const FockOperator direct = fock::second_quantize_contraction(basis, v);
            const FockOperator dilated = fock::second_quantize_contraction_dilated(basis, v);
            worst = std::max(worst, max_abs(direct - dilated));
        }
        return {make("contraction-dilation-route", "fock.dilation", 0.0, worst, 1e-10)};
    }));

    futures.push_back(std::async(std::launch::async, []() -> RecordBatch {
        // compressing the rotated doubled space realizes the number semigroup
        const int d = 2;
        const FockBasis small(d, 3);
        const FockBasis doubled(2 * d, 3);
        const double theta = 0.6;
        const double t = -std::log(std::cos(theta));
        const Eigen::MatrixXd iso =
            Eigen::MatrixXd(fock::embed_into_doubled(small, doubled));
        const FockOperator rot = fock::rotation_dilation(doubled, theta, d);
        const Eigen::MatrixXcd lhs = iso.transpose().cast<fock::Complex>() *
                                     fock::to_dense(rot) * iso.cast<fock::Complex>();
        const Eigen::MatrixXcd rhs = fock::to_dense(fock::semigroup(small, t));
        return {make("rotation-compression-semigroup", "fock.rotation-semigroup", 0.0,
                     (lhs - rhs).cwiseAbs().maxCoeff(), 1e-10)};
    }));

    futures.push_back(std::async(std::launch::async, [q, dim, cutoff]() -> RecordBatch {
        // deletion operator as the inner-product adjoint of insertion
        const FockBasis basis(dim, cutoff);
        const QGram gram(basis, q);
        double worst = 0.0;
        for (int k = 0; k < dim; ++k) {
            const FockOperator direct = fock::annihilation(basis, unit(dim, k), q);
            const FockOperator dual = fock::q_adjoint(fock::creation(basis, unit(dim, k)), gram);
            const Eigen::MatrixXcd diff = fock::to_dense(direct - dual);
            // the duality is exact below the cutoff; the top degree is truncated
            worst = std::max(worst, diff.leftCols(basis.degree_begin(cutoff))
                                        .cwiseAbs()
                                        .maxCoeff());
        }
        return {make("deletion-adjoint-duality", "fock.adjoint", 0.0, worst, 1e-12)};
    }));

    return assemble("fock", seed,
                    {{"q", fmt(q)}, {"dim", std::to_string(dim)},
                     {"cutoff", std::to_string(cutoff)}},
                    std::move(futures));
}

Report suite_wick(double q, std::uint64_t seed) {
    std::vector<std::future<RecordBatch>> futures;

    futures.push_back(std::async(std::launch::async, [q]() -> RecordBatch {
        const FockBasis basis(2, 4);
        double worst = 0.0;
        for (long i = 0; i < basis.degree_begin(3) + basis.degree_size(3); ++i) {
            Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(basis.size());
            xi(i) = 1.0;
            const FockOperator w = wick::wick_word(basis, q, xi, 1);
            Eigen::VectorXcd applied = Eigen::MatrixXcd(w.mat).col(0);
            worst = std::max(worst, (applied - xi).cwiseAbs().maxCoeff());
        }
        return {make("wick-vacuum-fixing", "wick.vacuum", 0.0, worst, 1e-12)};
    }));

    futures.push_back(std::async(std::launch::async, [q]() -> RecordBatch {
        // convolution expansion against the operator product, compared on the
        // columns that the truncation leaves exact
        const FockBasis basis(2, 6);
        double worst = 0.0;
        for (int m = 1; m <= 3; ++m)
            for (int mp = 1; mp + m <= 4; ++mp) {
                for (long iu = 0; iu < basis.degree_size(m); ++iu)
                    for (long iv = 0; iv < basis.degree_size(mp); ++iv) {
                        Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(basis.size());
                        Eigen::VectorXcd eta = Eigen::VectorXcd::Zero(basis.size());
                        xi(basis.degree_begin(m) + iu) = 1.0;
                        eta(basis.degree_begin(mp) + iv) = 1.0;
                        const FockOperator prod =
                            wick::wick_word(basis, q, xi) * wick::wick_word(basis, q, eta);
                        const auto terms = wick::wick_product_expansion(basis, q, xi, eta);
                        FockOperator sum = 0.0 * fock::identity_op(basis);
                        for (const auto& term : terms) {
                            Eigen::VectorXcd w = Eigen::VectorXcd::Zero(basis.size());
                            w(term.word_index) = 1.0;
                            sum = sum + term.coeff * wick::wick_word(basis, q, w);
                        }
                        const Eigen::MatrixXcd diff = fock::to_dense(prod - sum);
                        const int good = 6 - (m + mp);
                        worst = std::max(worst,
                                         diff.leftCols(basis.degree_begin(good) +
                                                       basis.degree_size(good))
                                             .cwiseAbs()
                                             .maxCoeff());
                    }
            }
        return {make("wick-product-convolution", "wick.convolution", 0.0, worst, 1e-10)};
    }));

    futures.push_back(std::async(std::launch::async, [q]() -> RecordBatch {
        const FockBasis basis(2, 4);
        const std::vector<Eigen::VectorXd> hs = {runit(2, 0), runit(2, 1), runit(2, 0)};
        int failures = 0;
        const double t = 0.41;
        if (!wick::eigenvector_check(basis, q, Partition::from_blocks(1, {{1}}), {runit(2, 0)},
                                     t))
            ++failures;
        if (!wick::eigenvector_check(basis, q, Partition::from_blocks(2, {{1, 2}}),
                                     {runit(2, 0), runit(2, 0)}, t))
            ++failures;
        if (!wick::eigenvector_check(basis, q, Partition::from_blocks(3, {{1}, {2}, {3}}), hs, t))
            ++failures;
        return {make("wick-semigroup-eigenvectors", "wick.eigenvectors", 0.0, failures, 0.0)};
    }));

    futures.push_back(std::async(std::launch::async, [q]() -> RecordBatch {
        // the replica average preserves all short moments
        const int base_dim = 2;
        double worst = 0.0;
        for (int n = 1; n <= 3; ++n) {
            const FockBasis small(base_dim, 4);
            const FockBasis repl(base_dim * n, 4);
            for (int len = 1; len <= 4; ++len)
                for (int bits = 0; bits < (1 << len); ++bits) {
                    std::vector<Eigen::VectorXd> hs;
                    FockOperator direct = fock::identity_op(small);
                    for (int pos = 0; pos < len; ++pos) {
                        const int letter = (bits >> pos) & 1;
                        hs.push_back(runit(base_dim, letter));
                        direct = direct *
                                 fock::field(small, unit(base_dim, letter).cast<fock::Complex>(),
                                             q);
                    }
                    const FockOperator embedded = wick::un_embed(repl, q, hs, base_dim, n);
                    worst = std::max(worst, std::abs(fock::vacuum_trace(embedded) -
                                                     fock::vacuum_trace(direct)));
                }
        }
        return {make("replica-moment-preservation", "wick.replica", 0.0, worst, 1e-10)};
    }));

    futures.push_back(std::async(std::launch::async, [q]() -> RecordBatch {
        // combinatorial fourth norm of the three-letter block word against the
        // dense route at n = 2
        const Partition sigma = Partition::from_blocks(3, {{1, 2, 3}});
        const std::vector<Eigen::VectorXd> hs = {runit(1, 0), runit(1, 0), runit(1, 0)};
        const long n = 2;
        const double comb = wick::sigma_word_norm4(sigma, hs, q, n);
        const FockBasis repl(static_cast<int>(n), 6);
        const QGram gram(repl, q);
        const FockOperator x = wick::x_sigma_n(repl, q, sigma, hs, 1, static_cast<int>(n));
        const FockOperator xs = fock::q_adjoint(x, gram);
        const double dense = fock::vacuum_trace(xs * x * xs * x).real();
        RecordBatch out = {
            make("surrogate-norm4-agreement", "wick.norm4", dense, comb, 1e-10)};
        const double slope =
            wick::decay_probe(sigma, hs, q, std::vector<long>{2, 4, 8, 16});
        Record decay;
        decay.name = "surrogate-decay-slope";
        decay.ref = "wick.decay";
        decay.expected = -0.25;  // decay must be at least this fast
        decay.actual = slope;
        decay.tolerance = 0.0;
        decay.pass = slope <= -0.25 && slope > -3.0;
        out.push_back(decay);
        return out;
    }));

    (void)seed;
    return assemble("wick", seed, {{"q", fmt(q)}}, std::move(futures));
}

Report suite_gqg(const std::string& group, double q, int kdim, int cutoff, std::uint64_t seed) {
    using gqg::CrossedProductModel;
    using gqg::FiniteGroup;
    using gqg::GroupAction;
    using gqg::RepChoice;
    const FiniteGroup grp = FiniteGroup::builtin_or_file(group);
    std::vector<std::future<RecordBatch>> futures;

    futures.push_back(std::async(std::launch::async, [grp, q, kdim, cutoff]() -> RecordBatch {
        double worst = 0.0;
        for (const auto rep : {RepChoice::Trivial, RepChoice::Conjugation}) {
            const CrossedProductModel model(GroupAction::translation(grp), rep, kdim,
                                            std::min(cutoff, 2), q);
            const auto om = model.vacuum();
            std::vector<CrossedProductModel::Vec> probes = {
                om, model.apply_generator(grp.order - 1, 0, om)};
            for (int g = 0; g < grp.order; ++g)
                for (int y = 0; y < model.action.npoints; ++y) {
                    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(model.action.npoints);
                    a(y) = 1.0;
                    Eigen::VectorXcd shifted = Eigen::VectorXcd::Zero(model.action.npoints);
                    for (int x = 0; x < model.action.npoints; ++x)
                        shifted(x) = a(model.action.act(grp.inverse(g), x));
                    for (const auto& v : probes) {
                        const auto lhs =
                            model.apply_generator(g, 0, model.apply_pointwise(a, v));
                        const auto rhs =
                            model.apply_pointwise(shifted, model.apply_generator(g, 0, v));
                        worst = std::max(worst,
                                         CrossedProductModel::norm_inf_diff(lhs, rhs));
                    }
                }
        }
        return {make("generator-covariance", "gqg.covariance", 0.0, worst, 1e-12)};
    }));

    futures.push_back(std::async(std::launch::async, [grp, q, kdim]() -> RecordBatch {
        const CrossedProductModel model(GroupAction::trivial(grp), RepChoice::Conjugation, kdim,
                                        2, q);
        const Eigen::MatrixXcd gram = gqg::gram_matrix(model);
        double worst = 0.0;
        for (int g = 1; g < std::min(grp.order, 4); ++g) {
            const Eigen::MatrixXcd s = gqg::to_matrix(model, [&](const auto& v) {
                return model.apply_generator(g, 0, v);
            });
            const Eigen::MatrixXcd t = gqg::to_matrix(model, [&](const auto& v) {
                return model.apply_generator(grp.inverse(g), 0, v);
            });
            worst = std::max(worst, (s.adjoint() * gram - gram * t).cwiseAbs().maxCoeff());
        }
        return {make("generator-adjoint-inverse", "gqg.adjoint", 0.0, worst, 1e-12)};
    }));

    futures.push_back(std::async(std::launch::async, [grp, q]() -> RecordBatch {
        // first noncommuting pair if one exists, else any pair
        int g1 = 1 % grp.order, g2 = g1;
        bool found = false;
        for (int a = 1; a < grp.order && !found; ++a)
            for (int b = 1; b < grp.order && !found; ++b)
                if (grp.op(a, b) != grp.op(b, a)) {
                    g1 = a;
                    g2 = b;
                    found = true;
                }
        if (!found && grp.order > 2) g2 = 2;
        const CrossedProductModel model(GroupAction::trivial(grp), RepChoice::Trivial, 2, 4, q);
        const auto out = gqg::commutator_extraction(model, g1, g2, 0, 1);
        const int c = grp.op(grp.op(g1, g2), grp.op(grp.inverse(g1), grp.inverse(g2)));
        const auto expected = CrossedProductModel::add(
            {}, model.apply_unitary(c, model.vacuum()), q);
        return {make("commutator-extraction", "gqg.commutator", 0.0,
                     CrossedProductModel::norm_inf_diff(out, expected), 1e-10)};
    }));

    futures.push_back(std::async(std::launch::async, [grp, q]() -> RecordBatch {
        const CrossedProductModel small(GroupAction::translation(grp), RepChoice::Trivial, 1, 2,
                                        q);
        const CrossedProductModel doubled(GroupAction::translation(grp), RepChoice::Trivial, 2, 2,
                                          q);
        const double theta = 0.7;
        const double t = -std::log(std::cos(theta));
        double worst = 0.0;
        for (long i = 0; i < small.basis_size(); ++i) {
            CrossedProductModel::Vec e;
            e[small.pack(small.basis_key(i))] = 1.0;
            const auto rotated = gqg::compress_doubled(
                small, doubled,
                gqg::apply_k_rotation(doubled, theta, gqg::embed_doubled(small, doubled, e)));
            worst = std::max(worst, CrossedProductModel::norm_inf_diff(
                                        rotated, small.apply_semigroup(t, e)));
        }
        return {make("semigroup-rotation-factorization", "gqg.factorization", 0.0, worst, 1e-10)};
    }));

    futures.push_back(std::async(std::launch::async, [grp, q]() -> RecordBatch {
        const CrossedProductModel model(GroupAction::translation(grp), RepChoice::Trivial, 1, 2,
                                        q);
        const int g = grp.order - 1;
        const double defect = gqg::c0_centrality_defect(model, {g, grp.inverse(g)}, {0, 0});
        return {make("invariant-product-centrality", "gqg.c0-central", 0.0, defect, 1e-10)};
    }));

    futures.push_back(std::async(std::launch::async, [grp]() -> RecordBatch {
        const auto act = GroupAction::trivial(grp);
        const CrossedProductModel model(GroupAction::trivial(grp), RepChoice::Trivial, 1, 2, 0.0);
        const Eigen::VectorXcd one = Eigen::VectorXcd::Ones(1);
        double worst = 0.0;
        for (const int len : {2, 4}) {
            std::vector<int> gs(static_cast<size_t>(len), 0);
            bool done = false;
            while (!done) {
                const std::vector<Eigen::VectorXcd> as(static_cast<size_t>(len), one);
                const auto closed = gqg::free_moment_nc(act, gs, as, 0.0);
                const auto oracle = gqg::model_conditional_expectation(model, gs, as, 0);
                worst = std::max(worst, (closed - oracle).cwiseAbs().maxCoeff());
                int pos = len - 1;
                while (pos >= 0 && gs[static_cast<size_t>(pos)] == grp.order - 1)
                    gs[static_cast<size_t>(pos--)] = 0;
                if (pos < 0)
                    done = true;
                else
                    ++gs[static_cast<size_t>(pos)];
            }
        }
        return {make("free-noncrossing-rule", "gqg.free-nc", 0.0, worst, 1e-10)};
    }));

    futures.push_back(std::async(std::launch::async, [grp, q]() -> RecordBatch {
        // components of generator products stay in cosets of the derived group
        const auto derived = gqg::commutator_subgroup(grp);
        const CrossedProductModel model(GroupAction::trivial(grp), RepChoice::Conjugation, 2, 3,
                                        q);
        int violations = 0;
        std::uint64_t state = 0x2545f4914f6cdd1dULL;
        for (int trial = 0; trial < 20; ++trial) {
            auto v = model.vacuum();
            const int len = 1 + static_cast<int>(splitmix(state) % 3);
            for (int j = 0; j < len; ++j)
                v = model.apply_generator(static_cast<int>(splitmix(state) % grp.order),
                                          static_cast<int>(splitmix(state) % 2), v);
            for (const auto& [code, c] : v) {
                if (std::abs(c) < 1e-14) continue;
                const auto key = model.unpack(code);
                int prod = grp.identity;
                for (int l : key.w) prod = grp.op(prod, model.letter_group(l));
                const int rel = grp.op(prod, grp.inverse(key.g));
                if (std::find(derived.begin(), derived.end(), rel) == derived.end())
                    ++violations;
            }
        }
        return {make("eigenspace-group-labels", "gqg.labels", 0.0, violations, 0.0)};
    }));

    return assemble("gqg", seed,
                    {{"group", group}, {"q", fmt(q)}, {"kdim", std::to_string(kdim)},
                     {"cutoff", std::to_string(cutoff)}},
                    std::move(futures));
}

Report suite_rigidity(int resolution, int trials, std::uint64_t seed) {
    using namespace rigidity;
    std::vector<std::future<RecordBatch>> futures;
    const int L = resolution;

    futures.push_back(std::async(std::launch::async, [L]() -> RecordBatch {
        RecordBatch out;
        out.push_back(make("origin-fixed-point", "rigidity.origin", 0.0,
                           invariance_defect(elementary_family(1), coordinate_characters(),
                                             GridMeasure::origin(L)),
                           0.0));
        out.push_back(make("character-point-half", "rigidity.char-half", 2.0,
                           character_defect({1, 0}, GridMeasure::point(L, L / 2, 0)), 1e-12));
        out.push_back(make("character-point-quarter", "rigidity.char-quarter", std::sqrt(2.0),
                           character_defect({1, 0}, GridMeasure::point(L, L / 4, 0)), 1e-12));
        return out;
    }));

    futures.push_back(std::async(std::launch::async, [L]() -> RecordBatch {
        double violation = 0.0;
        for (const double beta : {1e-3, 1e-2, 0.1, 0.5}) {
            GridMeasure mu = GridMeasure::zero(L);
            mu.weights(0, 0) = 1.0 - beta;
            mu.weights(L / 2, L / 2) = beta;
            const auto rep = tpp_concentration(mu, 1.0);
            violation = std::max(violation,
                                 std::max(0.0, rep.l1_distance - rep.bound_40delta));
        }
        return {make("mixture-concentration-bound", "rigidity.forty-bound", 0.0, violation,
                     1e-12)};
    }));

    futures.push_back(std::async(std::launch::async, [L, trials, seed]() -> RecordBatch {
        const auto rep = adversarial_min_defect(L, trials, derive_seed(seed, "adversary"));
        Record r;
        r.name = "adversary-min-defect";
        r.ref = "rigidity.adversary";
        r.expected = 0.05;  // lower bound the search must respect
        r.actual = rep.min_defect;
        r.tolerance = 0.0;
        r.pass = rep.min_defect >= 0.05;
        return {r};
    }));

    return assemble("rigidity", seed,
                    {{"resolution", std::to_string(resolution)},
                     {"trials", std::to_string(trials)}},
                    std::move(futures));
}

Report gap_sweep(const std::vector<int>& fsizes, double q, int cutoff) {
    if (fsizes.empty()) throw std::invalid_argument("gap sweep: at least one family size");
    std::vector<std::future<RecordBatch>> futures;
    std::vector<std::future<gqg::GapReport>> runs;
    for (const int f : fsizes)
        runs.push_back(std::async(std::launch::async,
                                  [f, q, cutoff]() { return gqg::spectral_gap(f, q, cutoff); }));
    std::vector<gqg::GapReport> reports;
    for (auto& r : runs) reports.push_back(r.get());

    Report rep;
    rep.suite = "gap";
    std::ostringstream fs;
    for (size_t i = 0; i < fsizes.size(); ++i) fs << (i ? " " : "") << fsizes[i];
    rep.config = {{"fsizes", fs.str()}, {"q", fmt(q)}, {"cutoff", std::to_string(cutoff)}};
    double worst_tau = 0.0;
    for (const auto& g : reports) {
        Record r;
        r.name = "gap-fsize-" + std::to_string(g.fsize);
        r.ref = "gap.positive";
        r.expected = 0.0;
        r.actual = g.lambda_min;
        r.tolerance = 0.0;
        r.pass = g.lambda_min > 0.0;
        rep.records.push_back(r);
        worst_tau = std::max(worst_tau, g.tau_defect);
    }
    rep.records.push_back(make("gap-normalization-trace", "gap.trace", 0.0, worst_tau, 1e-12));
    if (reports.size() > 1) {
        double min_step = std::numeric_limits<double>::infinity();
        for (size_t i = 1; i < reports.size(); ++i)
            min_step = std::min(min_step, reports[i].lambda_min - reports[i - 1].lambda_min);
        Record r;
        r.name = "gap-monotone-growth";
        r.ref = "gap.monotone";
        r.expected = 0.0;
        r.actual = min_step;
        r.tolerance = 0.0;
        r.pass = min_step > 0.0;
        rep.records.push_back(r);
    }
    std::sort(rep.records.begin(), rep.records.end(),
              [](const Record& a, const Record& b) { return a.name < b.name; });
    return rep;
}

Report moments_table(double q, int maxlen) {
    if (maxlen < 1 || maxlen > 10)
        throw std::invalid_argument("moments: word length must be between 1 and 10");
    const FockBasis basis(2, maxlen);
    std::vector<FockOperator> s = {fock::field(basis, unit(2, 0), q),
                                   fock::field(basis, unit(2, 1), q)};
    Report rep;
    rep.suite = "moments";
    rep.config = {{"q", fmt(q)}, {"maxlen", std::to_string(maxlen)}};
    for (int len = 1; len <= maxlen; ++len)
        for (int bits = 0; bits < (1 << len); ++bits) {
            FockOperator prod = fock::identity_op(basis);
            std::vector<Eigen::VectorXd> hs;
            std::string word;
            for (int pos = 0; pos < len; ++pos) {
                const int letter = (bits >> pos) & 1;
                prod = prod * s[static_cast<size_t>(letter)];
                hs.push_back(runit(2, letter));
                word.push_back(letter ? 'k' : 'h');
            }
            rep.records.push_back(make("word-" + word, "moments.pairing-sum",
                                       fock::moment_combinatorial(hs, q),
                                       fock::vacuum_trace(prod).real(), 1e-10));
        }
    std::sort(rep.records.begin(), rep.records.end(),
              [](const Record& a, const Record& b) { return a.name < b.name; });
    return rep;
}

}  // namespace qlab::suites
