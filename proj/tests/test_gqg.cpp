#include "doctest.h"
#include "qlab/gqg.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

using namespace qlab;
using gqg::CrossedProductModel;
using gqg::FiniteGroup;
using gqg::GroupAction;
using gqg::RepChoice;
using Vec = CrossedProductModel::Vec;

namespace {

int label_index(const FiniteGroup& g, const std::string& label) {
    for (int i = 0; i < g.order; ++i)
        if (g.labels[static_cast<size_t>(i)] == label) return i;
    throw std::runtime_error("label not found: " + label);
}

Eigen::VectorXcd indicator(int npoints, int y) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(npoints);
    a(y) = 1.0;
    return a;
}

Eigen::VectorXcd ones(int npoints) { return Eigen::VectorXcd::Ones(npoints); }

// deterministic low-discrepancy coefficients for oracle comparisons
Eigen::VectorXcd probe_function(int npoints, int seed) {
    Eigen::VectorXcd a(npoints);
    for (int x = 0; x < npoints; ++x) {
        const double t = 0.5 + 0.37 * std::sin(1.7 * (x + 1) * (seed + 2)) +
                         0.21 * std::cos(0.9 * (x + 3) * (seed + 1));
        const double u = 0.3 * std::sin(2.3 * (x + 2) * (seed + 3));
        a(x) = std::complex<double>(t, u);
    }
    return a;
}

}  // namespace

TEST_CASE("finite groups: structure and commutator subgroups") {
    const auto s3 = FiniteGroup::symmetric3();
    REQUIRE(s3.order == 6);
    REQUIRE(s3.identity == 0);
    for (int a = 0; a < 6; ++a) REQUIRE(s3.op(a, s3.inverse(a)) == s3.identity);

    const auto derived = gqg::commutator_subgroup(s3);
    REQUIRE(derived.size() == 3);  // alternating subgroup
    for (int a : derived) {
        // elements of the rotation subgroup: identity and the two 3-cycles
        const auto& l = s3.labels[static_cast<size_t>(a)];
        REQUIRE((l == "e" || l == "(012)" || l == "(021)"));
    }

    REQUIRE(gqg::commutator_subgroup(FiniteGroup::cyclic(4)).size() == 1);
    REQUIRE(gqg::commutator_subgroup(FiniteGroup::klein4()).size() == 1);
    REQUIRE(gqg::commutator_subgroup(FiniteGroup::dihedral4()).size() == 2);

    const auto d4 = FiniteGroup::dihedral4();
    REQUIRE(d4.order == 8);
    REQUIRE(d4.op(label_index(d4, "r1"), label_index(d4, "r3")) == d4.identity);

    REQUIRE_THROWS_AS(FiniteGroup::builtin_or_file("nonsense"), std::invalid_argument);
    const auto z6 = FiniteGroup::builtin_or_file("z6");
    REQUIRE(z6.order == 6);
    const auto json = FiniteGroup::from_json_text(
        R"({"order":2,"mul":[0,1,1,0],"labels":["e","t"]})");
    REQUIRE(json.inverse(1) == 1);
}

TEST_CASE("group actions: translation is a homomorphism of permutations") {
    const auto act = GroupAction::translation(FiniteGroup::symmetric3());
    REQUIRE(act.npoints == 6);
    act.validate();
    for (int g = 0; g < 6; ++g) REQUIRE(act.act(g, act.group.identity) == g);
    const auto triv = GroupAction::trivial(FiniteGroup::cyclic(3), 4);
    for (int g = 0; g < 3; ++g)
        for (int x = 0; x < 4; ++x) REQUIRE(triv.act(g, x) == x);
}

TEST_CASE("model basics: cyclic vector, key round trip, inner product") {
    const CrossedProductModel model(GroupAction::translation(FiniteGroup::symmetric3()),
                                    RepChoice::Conjugation, 2, 2, 0.5);
    const auto om = model.vacuum();
    REQUIRE(std::abs(model.inner(om, om) - 1.0) < 1e-14);

    for (long i = 0; i < model.basis_size(); i += 97) {
        const auto key = model.basis_key(i);
        REQUIRE(model.index_of(key) == i);
        const auto back = model.unpack(model.pack(key));
        REQUIRE(back.x == key.x);
        REQUIRE(back.g == key.g);
        REQUIRE(back.w == key.w);
    }

    // generators applied to the cyclic vector are unit vectors
    for (int g = 0; g < 6; ++g)
        for (int k = 0; k < 2; ++k) {
            const auto v = model.apply_generator(g, k, om);
            REQUIRE(std::abs(model.inner(v, v) - 1.0) < 1e-13);
        }
}

TEST_CASE("unitaries: homomorphism and covariance with pointwise functions") {
    for (const auto rep : {RepChoice::Trivial, RepChoice::Conjugation}) {
        const CrossedProductModel model(GroupAction::translation(FiniteGroup::symmetric3()), rep,
                                        2, 2, 0.4);
        const auto& grp = model.action.group;
        const auto om = model.vacuum();
        Vec probe = model.apply_generator(3, 1, model.apply_generator(1, 0, om));
        for (int g = 0; g < grp.order; ++g)
            for (int h = 0; h < grp.order; ++h) {
                const auto lhs = model.apply_unitary(g, model.apply_unitary(h, probe));
                const auto rhs = model.apply_unitary(grp.op(g, h), probe);
                REQUIRE(CrossedProductModel::norm_inf_diff(lhs, rhs) < 1e-14);
            }
        // u_g a u_g^{-1} = a(g^{-1} .)
        for (int g = 0; g < grp.order; ++g)
            for (int y = 0; y < model.action.npoints; ++y) {
                const auto a = indicator(model.action.npoints, y);
                Eigen::VectorXcd shifted = Eigen::VectorXcd::Zero(model.action.npoints);
                for (int x = 0; x < model.action.npoints; ++x)
                    shifted(x) = a(model.action.act(grp.inverse(g), x));
                const auto lhs = model.apply_unitary(
                    g, model.apply_pointwise(a, model.apply_unitary(grp.inverse(g), probe)));
                const auto rhs = model.apply_pointwise(shifted, probe);
                REQUIRE(CrossedProductModel::norm_inf_diff(lhs, rhs) < 1e-14);
            }
    }
}

TEST_CASE("generators intertwine pointwise functions through the action") {
    for (const auto rep : {RepChoice::Trivial, RepChoice::Conjugation}) {
        const CrossedProductModel model(GroupAction::translation(FiniteGroup::symmetric3()), rep,
                                        2, 2, 0.5);
        const auto& grp = model.action.group;
        const auto om = model.vacuum();
        std::vector<Vec> probes = {om, model.apply_generator(2, 1, om),
                                   model.apply_generator(4, 0, model.apply_generator(1, 1, om))};
        for (int g = 0; g < grp.order; ++g)
            for (int k = 0; k < 2; ++k)
                for (int y = 0; y < model.action.npoints; ++y) {
                    const auto a = indicator(model.action.npoints, y);
                    Eigen::VectorXcd shifted = Eigen::VectorXcd::Zero(model.action.npoints);
                    for (int x = 0; x < model.action.npoints; ++x)
                        shifted(x) = a(model.action.act(grp.inverse(g), x));
                    for (const auto& v : probes) {
                        const auto lhs =
                            model.apply_generator(g, k, model.apply_pointwise(a, v));
                        const auto rhs =
                            model.apply_pointwise(shifted, model.apply_generator(g, k, v));
                        REQUIRE(CrossedProductModel::norm_inf_diff(lhs, rhs) < 1e-13);
                    }
                }
    }
}

TEST_CASE("generator adjoint swaps the group element") {
    for (const auto rep : {RepChoice::Trivial, RepChoice::Conjugation}) {
        const CrossedProductModel model(GroupAction::trivial(FiniteGroup::symmetric3()), rep, 2,
                                        2, 0.4);
        const auto& grp = model.action.group;
        const Eigen::MatrixXcd gram = gqg::gram_matrix(model);
        for (const int g : {1, 3, 5}) {
            const Eigen::MatrixXcd s = gqg::to_matrix(
                model, [&](const Vec& v) { return model.apply_generator(g, 0, v); });
            const Eigen::MatrixXcd t = gqg::to_matrix(model, [&](const Vec& v) {
                return model.apply_generator(grp.inverse(g), 0, v);
            });
            // adjoint with respect to the model inner product: S^H G = G S(g^{-1})
            REQUIRE((s.adjoint() * gram - gram * t).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("commutator words compress to q times the commutator unitary") {
    const auto s3 = FiniteGroup::symmetric3();
    const int g1 = label_index(s3, "(01)");
    const int g2 = label_index(s3, "(02)");

    const CrossedProductModel model(GroupAction::trivial(s3), RepChoice::Trivial, 2, 4, 0.5);
    const auto out = gqg::commutator_extraction(model, g1, g2, 0, 1);
    const int c = s3.op(s3.op(g1, g2), s3.op(s3.inverse(g1), s3.inverse(g2)));
    REQUIRE(c != s3.identity);  // transpositions do not commute
    const auto expected = model.apply_unitary(c, model.vacuum());
    REQUIRE(CrossedProductModel::norm_inf_diff(out, CrossedProductModel::add({}, expected, 0.5)) <
            1e-10);

    // abelian group: the extraction is q times the identity on the cyclic vector
    const CrossedProductModel ab(GroupAction::trivial(FiniteGroup::cyclic(4)), RepChoice::Trivial,
                                 2, 4, 0.7);
    const auto aout = gqg::commutator_extraction(ab, 1, 2, 0, 1);
    REQUIRE(CrossedProductModel::norm_inf_diff(
                aout, CrossedProductModel::add({}, ab.vacuum(), 0.7)) < 1e-12);

    // free case: the coefficient vanishes
    const CrossedProductModel fr(GroupAction::trivial(s3), RepChoice::Trivial, 2, 4, 0.0);
    const auto fout = gqg::commutator_extraction(fr, g1, g2, 0, 1);
    REQUIRE(CrossedProductModel::norm_inf_diff(fout, {}) < 1e-14);

    REQUIRE_THROWS_AS(gqg::commutator_extraction(model, g1, g2, 1, 1), std::invalid_argument);
}

TEST_CASE("products with trivial total group label commute with functions") {
    const auto s3 = FiniteGroup::symmetric3();
    const CrossedProductModel model(GroupAction::translation(s3), RepChoice::Trivial, 1, 2, 0.3);
    for (const int g : {1, 3}) {
        REQUIRE(gqg::c0_centrality_defect(model, {g, s3.inverse(g)}, {0, 0}) < 1e-10);
    }
    REQUIRE(gqg::c0_centrality_defect(model, {}, {}) < 1e-15);
    REQUIRE_THROWS_AS(gqg::apply_c0_element(model, {1, 3}, {0, 0}, model.vacuum()),
                      std::domain_error);
}

TEST_CASE("number semigroup: eigenvalue on generators and compression identities") {
    const CrossedProductModel model(GroupAction::translation(FiniteGroup::symmetric3()),
                                    RepChoice::Conjugation, 2, 3, 0.5);
    const auto om = model.vacuum();
    const double t = 0.37;
    // degree-one vectors scale by e^{-t}
    const auto v1 = model.apply_generator(2, 1, om);
    REQUIRE(CrossedProductModel::norm_inf_diff(
                model.apply_semigroup(t, v1),
                CrossedProductModel::add({}, v1, std::exp(-t))) < 1e-14);
    // functions times the cyclic vector are fixed
    const auto v0 = model.apply_pointwise(probe_function(6, 1), om);
    REQUIRE(CrossedProductModel::norm_inf_diff(model.apply_semigroup(t, v0), v0) < 1e-15);

    // compression onto the subalgebra absorbs the semigroup and preserves the trace
    auto probe = model.apply_generator(1, 0, model.apply_generator(3, 1, om));
    probe = CrossedProductModel::add(probe, model.apply_generator(4, 0, om), {0.3, -0.2});
    probe = CrossedProductModel::add(probe, v0, 1.0);
    REQUIRE(CrossedProductModel::norm_inf_diff(
                model.project_onto_subalgebra(model.apply_semigroup(t, probe)),
                model.project_onto_subalgebra(probe)) < 1e-14);
    REQUIRE(std::abs(model.inner(om, model.project_onto_subalgebra(probe)) -
                     model.inner(om, probe)) < 1e-14);
}

TEST_CASE("semigroup factors through a rotation on the doubled coefficient space") {
    for (const auto rep : {RepChoice::Trivial, RepChoice::Conjugation}) {
        const auto z3 = FiniteGroup::cyclic(3);
        const CrossedProductModel small(GroupAction::translation(z3), rep, 1, 2, 0.5);
        const CrossedProductModel doubled(GroupAction::translation(z3), rep, 2, 2, 0.5);
        const double theta = 0.7;
        const double t = -std::log(std::cos(theta));
        for (long i = 0; i < small.basis_size(); ++i) {
            Vec e;
            e[small.pack(small.basis_key(i))] = 1.0;
            const auto rotated = gqg::compress_doubled(
                small, doubled,
                gqg::apply_k_rotation(doubled, theta, gqg::embed_doubled(small, doubled, e)));
            REQUIRE(CrossedProductModel::norm_inf_diff(rotated, small.apply_semigroup(t, e)) <
                    1e-12);
        }
    }
}

TEST_CASE("degree components of generator products carry admissible group labels") {
    const auto s3 = FiniteGroup::symmetric3();
    const auto derived = gqg::commutator_subgroup(s3);
    const auto in_derived = [&](int g) {
        for (int a : derived)
            if (a == g) return true;
        return false;
    };
    for (const auto rep : {RepChoice::Trivial, RepChoice::Conjugation}) {
        const CrossedProductModel model(GroupAction::translation(s3), rep, 2, 4, 0.5);
        const std::vector<std::vector<std::pair<int, int>>> words = {
            {{1, 0}},
            {{1, 0}, {2, 1}},
            {{3, 0}, {5, 1}, {1, 0}},
            {{1, 0}, {2, 1}, {4, 0}, {5, 1}},
            {{2, 0}, {2, 0}, {3, 1}, {1, 1}},
        };
        for (const auto& word : words) {
            auto v = model.vacuum();
            for (auto it = word.rbegin(); it != word.rend(); ++it)
                v = model.apply_generator(it->first, it->second, v);
            for (const auto& [code, c] : v) {
                if (std::abs(c) < 1e-14) continue;
                const auto key = model.unpack(code);
                int prod = s3.identity;
                for (int l : key.w) prod = s3.op(prod, model.letter_group(l));
                REQUIRE(in_derived(s3.op(prod, s3.inverse(key.g))));
            }
        }
    }
}

TEST_CASE("polar decomposition of a generator is covariant on its support") {
    const CrossedProductModel model(GroupAction::translation(FiniteGroup::cyclic(3)),
                                    RepChoice::Trivial, 1, 2, 0.5);
    for (const int g : {1, 2}) {
        const auto rep = gqg::polar_covariance(model, g, 0);
        REQUIRE(rep.psd_defect > -1e-10);
        REQUIRE(rep.modulus_commute < 1e-8);
        REQUIRE(rep.covariance_defect < 1e-8);
        REQUIRE(rep.support_defect < 1e-10);
    }
}

TEST_CASE("free conditional expectation: closed-form examples") {
    const auto s3 = FiniteGroup::symmetric3();
    const auto act = GroupAction::translation(s3);
    const auto one = ones(act.npoints);
    for (int g = 1; g < 6; ++g) {
        const auto e2 = gqg::free_moment_nc(act, {g, s3.inverse(g)}, {one, one}, 0.0);
        REQUIRE((e2 - one).cwiseAbs().maxCoeff() < 1e-14);
        for (int h = 0; h < 6; ++h) {
            if (s3.op(g, h) == s3.identity) continue;
            const auto z = gqg::free_moment_nc(act, {g, h}, {one, one}, 0.0);
            REQUIRE(z.cwiseAbs().maxCoeff() < 1e-14);
        }
    }
    const auto odd = gqg::free_moment_nc(act, {1, 2, 3}, {one, one, one}, 0.0);
    REQUIRE(odd.cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE_THROWS_AS(gqg::free_moment_nc(act, {1, 4}, {one, one}, 0.5), std::domain_error);
}

TEST_CASE("free conditional expectation matches the model on pure generator words") {
    const auto s3 = FiniteGroup::symmetric3();
    const auto act = GroupAction::trivial(s3);
    const CrossedProductModel model(GroupAction::trivial(s3), RepChoice::Trivial, 1, 3, 0.0);
    const auto one = ones(1);
    for (const int len : {2, 4, 6}) {
        std::vector<int> gs(static_cast<size_t>(len), 0);
        bool done = false;
        while (!done) {
            const std::vector<Eigen::VectorXcd> as(static_cast<size_t>(len), one);
            const auto closed = gqg::free_moment_nc(act, gs, as, 0.0);
            const auto oracle = gqg::model_conditional_expectation(model, gs, as, 0);
            REQUIRE((closed - oracle).cwiseAbs().maxCoeff() < 1e-10);
            int pos = len - 1;
            while (pos >= 0 && gs[static_cast<size_t>(pos)] == 5) gs[static_cast<size_t>(pos--)] = 0;
            if (pos < 0)
                done = true;
            else
                ++gs[static_cast<size_t>(pos)];
        }
    }
}

TEST_CASE("free conditional expectation matches the model with coefficients") {
    const auto s3 = FiniteGroup::symmetric3();
    const auto act = GroupAction::translation(s3);
    const CrossedProductModel model(GroupAction::translation(s3), RepChoice::Trivial, 1, 2, 0.0);
    std::vector<Eigen::VectorXcd> pool;
    for (int s = 0; s < 4; ++s) pool.push_back(probe_function(act.npoints, s));
    std::vector<int> gs(4, 0);
    for (int trial = 0; trial < 200; ++trial) {
        std::uint64_t z = 0x9e3779b97f4a7c15ULL * (trial + 1);
        for (auto& g : gs) {
            z ^= z >> 27;
            z *= 0x2545f4914f6cdd1dULL;
            g = static_cast<int>(z % 6);
        }
        std::vector<Eigen::VectorXcd> as;
        for (int j = 0; j < 4; ++j) as.push_back(pool[static_cast<size_t>((trial + j) % 4)]);
        const auto closed = gqg::free_moment_nc(act, gs, as, 0.0);
        const auto oracle = gqg::model_conditional_expectation(model, gs, as, 0);
        REQUIRE((closed - oracle).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("coercivity probe: positive bottom eigenvalue, monotone in the family size") {
    const auto g1 = gqg::spectral_gap(1, 0.0, 3);
    REQUIRE(g1.tau_defect < 1e-12);
    REQUIRE(g1.lambda_min > 1.0);  // exact value 2 at q=0

    // with a single generator and degree-2 vectors admitted, x Omega minus its
    // trace commutes with x, so the bottom eigenvalue is genuinely zero
    const auto k1 = gqg::spectral_gap(1, 0.0, 4);
    REQUIRE(std::abs(k1.lambda_min) < 1e-12);
    const auto k2 = gqg::spectral_gap(2, 0.0, 4);
    REQUIRE(k2.lambda_min > 1.0);  // two generators have trivial joint commutant here

    const auto h1 = gqg::spectral_gap(1, 0.3, 3);
    const auto h2 = gqg::spectral_gap(2, 0.3, 3);
    const auto h4 = gqg::spectral_gap(4, 0.3, 3);
    REQUIRE(h1.tau_defect < 1e-12);
    REQUIRE(h2.tau_defect < 1e-12);
    REQUIRE(h4.tau_defect < 1e-12);
    REQUIRE(h2.lambda_min > 0.0);
    REQUIRE(h4.lambda_min > h2.lambda_min);
    REQUIRE(h2.lambda_min > h1.lambda_min);
}

TEST_CASE("resource guards and argument validation") {
    const auto s3 = FiniteGroup::symmetric3();
    REQUIRE_THROWS_AS(CrossedProductModel(GroupAction::trivial(s3), RepChoice::Trivial, 1, 6, 0.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(CrossedProductModel(GroupAction::trivial(s3), RepChoice::Trivial, 0, 2, 0.0),
                      std::invalid_argument);
    const CrossedProductModel big(GroupAction::translation(s3), RepChoice::Trivial, 2, 4, 0.5);
    REQUIRE(big.basis_size() > 50000);
    REQUIRE_THROWS_AS(gqg::gram_matrix(big), fock::ResourceError);
    REQUIRE_THROWS_AS(gqg::to_matrix(big, [](const Vec& v) { return v; }), fock::ResourceError);
}
