#include "qlab/gqg.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace qlab::gqg {

namespace {
constexpr long kMaxDenseCoords = 50000;

void check_model_dense(long n) {
    if (n > kMaxDenseCoords)
        throw fock::ResourceError("model: dense enumeration over " + std::to_string(n) +
                                  " coordinates exceeds the 50000-coordinate budget");
    fock::check_dense_guard(n, n);
}
}  // namespace

CrossedProductModel::CrossedProductModel(GroupAction action_, RepChoice rep_, int kdim_,
                                         int cutoff_, double q_)
    : action(std::move(action_)), rep(rep_), kdim(kdim_), cutoff(cutoff_), q(q_) {
    action.validate();
    if (kdim <= 0) throw std::invalid_argument("model: kdim must be positive");
    if (cutoff < 0 || cutoff > 5)
        throw std::invalid_argument("model: cutoff must be in 0..5 (key packing limit)");
    if (action.npoints > 255 || action.group.order > 255 || letters() > 255)
        throw std::invalid_argument("model: point set, group, or alphabet too large for keys");
    if (std::abs(q) >= 1.0 && q != 1.0)
        throw std::invalid_argument("model: q must lie in (-1, 1]");
    const long L = letters();
    fock_offsets_.assign(1, 0);
    long sz = 0, pow = 1;
    for (int n = 0; n <= cutoff; ++n) {
        sz += pow;
        fock_offsets_.push_back(sz);
        pow *= L;
    }
    fock_size_ = sz;
}

std::uint64_t CrossedProductModel::pack(const Key& key) const {
    std::uint64_t code = static_cast<std::uint64_t>(key.x) |
                         (static_cast<std::uint64_t>(key.g) << 8) |
                         (static_cast<std::uint64_t>(key.w.size()) << 16);
    for (size_t i = 0; i < key.w.size(); ++i)
        code |= static_cast<std::uint64_t>(key.w[i]) << (20 + 8 * i);
    return code;
}

CrossedProductModel::Key CrossedProductModel::unpack(std::uint64_t code) const {
    Key key;
    key.x = static_cast<int>(code & 0xFF);
    key.g = static_cast<int>((code >> 8) & 0xFF);
    const int deg = static_cast<int>((code >> 16) & 0xF);
    key.w.resize(static_cast<size_t>(deg));
    for (int i = 0; i < deg; ++i)
        key.w[static_cast<size_t>(i)] = static_cast<int>((code >> (20 + 8 * i)) & 0xFF);
    return key;
}

CrossedProductModel::Vec CrossedProductModel::vacuum() const {
    Vec v;
    for (int x = 0; x < action.npoints; ++x)
        v[pack({x, action.group.identity, {}})] = 1.0;
    return v;
}

CrossedProductModel::Vec CrossedProductModel::apply_pointwise(const Eigen::VectorXcd& a,
                                                              const Vec& v) const {
    if (a.size() != action.npoints)
        throw std::invalid_argument("apply_pointwise: coefficient size mismatch");
    Vec out;
    for (const auto& [code, c] : v) {
        const Complex val = a(static_cast<int>(code & 0xFF)) * c;
        if (val != 0.0) out[code] = val;
    }
    return out;
}

CrossedProductModel::Vec CrossedProductModel::apply_unitary(int h, const Vec& v) const {
    Vec out;
    const auto& grp = action.group;
    const int hinv = grp.inverse(h);
    for (const auto& [code, c] : v) {
        Key key = unpack(code);
        key.x = action.act(h, key.x);
        key.g = grp.op(h, key.g);
        if (rep == RepChoice::Conjugation)
            for (int& l : key.w)
                l = letter(grp.op(grp.op(h, letter_group(l)), hinv), letter_k(l));
        out[pack(key)] += c;
    }
    return out;
}

CrossedProductModel::Vec CrossedProductModel::apply_field(const Eigen::VectorXcd& zeta,
                                                          const Vec& v) const {
    if (zeta.size() != letters())
        throw std::invalid_argument("apply_field: coefficient size mismatch");
    const auto& grp = action.group;
    Vec out;
    for (const auto& [code, c] : v) {
        const Key key = unpack(code);
        const int deg = static_cast<int>(key.w.size());
        if (deg < cutoff) {
            Key up = key;
            up.w.insert(up.w.begin(), 0);
            for (int l = 0; l < letters(); ++l) {
                if (zeta(l) == 0.0) continue;
                up.w[0] = l;
                out[pack(up)] += zeta(l) * c;
            }
        }
        double weight = 1.0;
        for (int j = 0; j < deg; ++j, weight *= q) {
            const int l = key.w[static_cast<size_t>(j)];
            const int twisted = letter(grp.inverse(letter_group(l)), letter_k(l));
            const Complex coef = zeta(twisted);
            if (coef != 0.0) {
                Key down = key;
                down.w.erase(down.w.begin() + j);
                out[pack(down)] += weight * coef * c;
            }
        }
    }
    return out;
}

CrossedProductModel::Vec CrossedProductModel::apply_generator(int g, int k, const Vec& v) const {
    Eigen::VectorXcd kvec = Eigen::VectorXcd::Zero(kdim);
    kvec(k) = 1.0;
    return apply_generator_kvec(g, kvec, v);
}

CrossedProductModel::Vec CrossedProductModel::apply_generator_kvec(int g,
                                                                   const Eigen::VectorXcd& kvec,
                                                                   const Vec& v) const {
    if (kvec.size() != kdim) throw std::invalid_argument("apply_generator: kvec size mismatch");
    Eigen::VectorXcd zeta = Eigen::VectorXcd::Zero(letters());
    for (int k = 0; k < kdim; ++k) zeta(letter(g, k)) = kvec(k);
    return apply_field(zeta, apply_unitary(g, v));
}

Complex CrossedProductModel::inner(const Vec& u, const Vec& v) const {
    Complex sum = 0.0;
    for (const auto& [cu, au] : u) {
        const Key ku = unpack(cu);
        for (const auto& [cv, av] : v) {
            // low 20 bits hold (x, g, degree); distinct values are orthogonal
            if ((cu ^ cv) & 0xFFFFFULL) continue;
            sum += std::conj(au) * av * fock::q_inner_words(ku.w, unpack(cv).w, q);
        }
    }
    return sum / static_cast<double>(action.npoints);
}

CrossedProductModel::Vec CrossedProductModel::project_degree(int n, const Vec& v) const {
    Vec out;
    for (const auto& [code, c] : v)
        if (static_cast<int>((code >> 16) & 0xF) == n) out[code] = c;
    return out;
}

CrossedProductModel::Vec CrossedProductModel::apply_semigroup(double t, const Vec& v) const {
    Vec out;
    for (const auto& [code, c] : v)
        out[code] = std::exp(-t * static_cast<double>((code >> 16) & 0xF)) * c;
    return out;
}

CrossedProductModel::Vec CrossedProductModel::project_onto_subalgebra(const Vec& v) const {
    Vec out;
    const std::uint64_t want = static_cast<std::uint64_t>(action.group.identity) << 8;
    for (const auto& [code, c] : v)
        if ((code >> 8) == (want >> 8)) out[code] = c;  // degree 0, identity group leg
    return out;
}

long CrossedProductModel::basis_size() const {
    return static_cast<long>(action.npoints) * action.group.order * fock_size_;
}

CrossedProductModel::Key CrossedProductModel::basis_key(long idx) const {
    Key key;
    long fidx = idx % fock_size_;
    const long rest = idx / fock_size_;
    key.g = static_cast<int>(rest % action.group.order);
    key.x = static_cast<int>(rest / action.group.order);
    int deg = 0;
    while (fock_offsets_[static_cast<size_t>(deg) + 1] <= fidx) ++deg;
    fidx -= fock_offsets_[static_cast<size_t>(deg)];
    key.w.assign(static_cast<size_t>(deg), 0);
    const long L = letters();
    for (int i = deg - 1; i >= 0; --i) {
        key.w[static_cast<size_t>(i)] = static_cast<int>(fidx % L);
        fidx /= L;
    }
    return key;
}

long CrossedProductModel::index_of(const Key& key) const {
    const long L = letters();
    long fidx = fock_offsets_[key.w.size()];
    long place = 0;
    for (int l : key.w) place = place * L + l;
    fidx += place;
    return (static_cast<long>(key.x) * action.group.order + key.g) * fock_size_ + fidx;
}

CrossedProductModel::Vec CrossedProductModel::add(const Vec& a, const Vec& b, Complex scale) {
    Vec out = a;
    for (const auto& [code, c] : b) out[code] += scale * c;
    return out;
}

double CrossedProductModel::norm_inf_diff(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (const auto& [code, c] : a) {
        const auto it = b.find(code);
        m = std::max(m, std::abs(c - (it == b.end() ? Complex(0.0) : it->second)));
    }
    for (const auto& [code, c] : b)
        if (!a.count(code)) m = std::max(m, std::abs(c));
    return m;
}

Eigen::MatrixXcd to_matrix(const CrossedProductModel& model,
                           const std::function<CrossedProductModel::Vec(
                               const CrossedProductModel::Vec&)>& op) {
    const long n = model.basis_size();
    check_model_dense(n);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (long j = 0; j < n; ++j) {
        CrossedProductModel::Vec e;
        e[model.pack(model.basis_key(j))] = 1.0;
        for (const auto& [code, c] : op(e)) m(model.index_of(model.unpack(code)), j) += c;
    }
    return m;
}

Eigen::MatrixXcd gram_matrix(const CrossedProductModel& model) {
    const long n = model.basis_size();
    check_model_dense(n);
    std::vector<std::uint64_t> codes(static_cast<size_t>(n));
    std::vector<fock::Word> words(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) {
        const auto key = model.basis_key(i);
        codes[static_cast<size_t>(i)] = model.pack(key);
        words[static_cast<size_t>(i)] = key.w;
    }
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
    const double scale = 1.0 / model.action.npoints;
    for (long i = 0; i < n; ++i)
        for (long j = i; j < n; ++j) {
            if ((codes[static_cast<size_t>(i)] ^ codes[static_cast<size_t>(j)]) & 0xFFFFFULL)
                continue;
            const double v = scale * fock::q_inner_words(words[static_cast<size_t>(i)],
                                                         words[static_cast<size_t>(j)], model.q);
            g(i, j) = v;
            g(j, i) = v;
        }
    return g;
}

CrossedProductModel::Vec commutator_extraction(const CrossedProductModel& model, int g1, int g2,
                                               int k1, int k2) {
    if (k1 == k2) throw std::invalid_argument("commutator_extraction: K-indices must differ");
    if (model.cutoff < 2)
        throw std::invalid_argument("commutator_extraction: cutoff >= 2 required for exactness");
    const auto& grp = model.action.group;
    auto v = model.vacuum();
    v = model.apply_generator(grp.inverse(g2), k2, v);
    v = model.apply_generator(grp.inverse(g1), k1, v);
    v = model.apply_generator(g2, k2, v);
    v = model.apply_generator(g1, k1, v);
    return model.project_degree(0, v);
}

CrossedProductModel::Vec apply_c0_element(const CrossedProductModel& model,
                                          const std::vector<int>& gs, const std::vector<int>& ks,
                                          const CrossedProductModel::Vec& v) {
    if (gs.size() != ks.size())
        throw std::invalid_argument("apply_c0_element: label count mismatch");
    const auto& grp = model.action.group;
    int prod = grp.identity;
    for (int g : gs) prod = grp.op(prod, g);
    if (prod != grp.identity)
        throw std::domain_error("apply_c0_element: group labels must multiply to the identity");
    auto out = v;
    for (size_t j = gs.size(); j-- > 0;) out = model.apply_generator(gs[j], ks[j], out);
    return out;
}

double c0_centrality_defect(const CrossedProductModel& model, const std::vector<int>& gs,
                            const std::vector<int>& ks) {
    const long n = model.basis_size();
    check_model_dense(n);
    double defect = 0.0;
    for (int y = 0; y < model.action.npoints; ++y) {
        Eigen::VectorXcd a = Eigen::VectorXcd::Zero(model.action.npoints);
        a(y) = 1.0;
        for (long i = 0; i < n; ++i) {
            CrossedProductModel::Vec e;
            e[model.pack(model.basis_key(i))] = 1.0;
            const auto xa = apply_c0_element(model, gs, ks, model.apply_pointwise(a, e));
            const auto ax = model.apply_pointwise(a, apply_c0_element(model, gs, ks, e));
            defect = std::max(defect, CrossedProductModel::norm_inf_diff(xa, ax));
        }
    }
    return defect;
}

CrossedProductModel::Vec apply_k_rotation(const CrossedProductModel& doubled, double theta,
                                          const CrossedProductModel::Vec& v) {
    if (doubled.kdim % 2 != 0)
        throw std::invalid_argument("apply_k_rotation: K-dimension must be even");
    const int half = doubled.kdim / 2;
    const double c = std::cos(theta), s = std::sin(theta);
    CrossedProductModel::Vec out;
    for (const auto& [code, coef] : v) {
        const auto key = doubled.unpack(code);
        // tensor action: each letter splits into its two rotated components
        std::vector<std::pair<CrossedProductModel::Key, Complex>> partial = {{key, coef}};
        for (size_t pos = 0; pos < key.w.size(); ++pos) {
            const int a = doubled.letter_group(key.w[pos]);
            const int k = doubled.letter_k(key.w[pos]);
            std::vector<std::pair<CrossedProductModel::Key, Complex>> next;
            for (auto& [pk, pc] : partial) {
                CrossedProductModel::Key other = pk;
                if (k < half) {
                    pk.w[pos] = doubled.letter(a, k);
                    other.w[pos] = doubled.letter(a, k + half);
                    next.emplace_back(std::move(pk), c * pc);
                    next.emplace_back(std::move(other), -s * pc);
                } else {
                    pk.w[pos] = doubled.letter(a, k - half);
                    other.w[pos] = doubled.letter(a, k);
                    next.emplace_back(std::move(pk), s * pc);
                    next.emplace_back(std::move(other), c * pc);
                }
            }
            partial = std::move(next);
        }
        for (const auto& [pk, pc] : partial) out[doubled.pack(pk)] += pc;
    }
    return out;
}

namespace {
void check_doubled_pair(const CrossedProductModel& small, const CrossedProductModel& doubled) {
    if (doubled.kdim != 2 * small.kdim || doubled.cutoff != small.cutoff ||
        doubled.q != small.q || doubled.rep != small.rep ||
        doubled.action.npoints != small.action.npoints ||
        doubled.action.group.order != small.action.group.order)
        throw std::invalid_argument("doubled model does not match the base model");
}
}  // namespace

CrossedProductModel::Vec embed_doubled(const CrossedProductModel& small,
                                       const CrossedProductModel& doubled,
                                       const CrossedProductModel::Vec& v) {
    check_doubled_pair(small, doubled);
    CrossedProductModel::Vec out;
    for (const auto& [code, c] : v) {
        auto key = small.unpack(code);
        for (int& l : key.w) l = doubled.letter(small.letter_group(l), small.letter_k(l));
        out[doubled.pack(key)] += c;
    }
    return out;
}

CrossedProductModel::Vec compress_doubled(const CrossedProductModel& small,
                                          const CrossedProductModel& doubled,
                                          const CrossedProductModel::Vec& v) {
    check_doubled_pair(small, doubled);
    CrossedProductModel::Vec out;
    for (const auto& [code, c] : v) {
        auto key = doubled.unpack(code);
        bool kept = true;
        for (int& l : key.w) {
            if (doubled.letter_k(l) >= small.kdim) {
                kept = false;
                break;
            }
            l = small.letter(doubled.letter_group(l), doubled.letter_k(l));
        }
        if (kept) out[small.pack(key)] += c;
    }
    return out;
}

PolarReport polar_covariance(const CrossedProductModel& model, int g, int k) {
    const long n = model.basis_size();
    check_model_dense(n);
    const Eigen::MatrixXcd s = to_matrix(
        model, [&](const CrossedProductModel::Vec& v) { return model.apply_generator(g, k, v); });
    const Eigen::MatrixXd gram = gram_matrix(model).real();
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("polar_covariance: inner product matrix not positive definite");
    const Eigen::MatrixXd lt = Eigen::MatrixXd(llt.matrixL()).transpose();
    const Eigen::MatrixXd lt_inv = lt.inverse();
    const Eigen::MatrixXcd st = lt * s * lt_inv;  // orthonormal coordinates

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(st, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
    Eigen::VectorXd ind = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i) ind(i) = sv(i) > tol ? 1.0 : 0.0;
    const Eigen::MatrixXcd vmat = svd.matrixV();
    const Eigen::MatrixXcd modulus = vmat * sv.asDiagonal() * vmat.adjoint();
    const Eigen::MatrixXcd f = vmat * ind.asDiagonal() * vmat.adjoint();
    const Eigen::MatrixXcd w = svd.matrixU() * ind.asDiagonal() * vmat.adjoint();

    PolarReport rep{};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (modulus + modulus.adjoint()));
    rep.psd_defect = es.eigenvalues().minCoeff();
    rep.support_defect = (w.adjoint() * w - f).norm();
    rep.modulus_commute = 0.0;
    rep.covariance_defect = 0.0;
    for (int y = 0; y < model.action.npoints; ++y) {
        Eigen::VectorXd dy = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd dgy = Eigen::VectorXd::Zero(n);
        const int gy = model.action.act(g, y);
        for (long i = 0; i < n; ++i) {
            const int x = model.basis_key(i).x;
            if (x == y) dy(i) = 1.0;
            if (x == gy) dgy(i) = 1.0;
        }
        const Eigen::MatrixXcd ay = lt * dy.asDiagonal() * lt_inv;
        const Eigen::MatrixXcd agy = lt * dgy.asDiagonal() * lt_inv;
        rep.modulus_commute = std::max(rep.modulus_commute, (modulus * ay - ay * modulus).norm());
        rep.covariance_defect =
            std::max(rep.covariance_defect, (w * ay * f - agy * w * f).norm());
    }
    return rep;
}

Eigen::VectorXcd free_moment_nc(const GroupAction& action, const std::vector<int>& gs,
                                const std::vector<Eigen::VectorXcd>& as, double q) {
    if (q != 0.0) throw std::domain_error("free_moment_nc: defined only at q = 0");
    if (gs.size() != as.size())
        throw std::invalid_argument("free_moment_nc: factor count mismatch");
    const auto& grp = action.group;
    const int npoints = action.npoints;
    for (const auto& a : as)
        if (a.size() != npoints)
            throw std::invalid_argument("free_moment_nc: coefficient size mismatch");
    const int m = static_cast<int>(gs.size());
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(npoints);
    if (m % 2 != 0) return out;

    // noncrossing pairings whose pairs carry mutually inverse group labels,
    // counted by interval recursion on [i, j]
    std::vector<double> memo(static_cast<size_t>((m + 1) * (m + 1)), -1.0);
    auto count = [&](auto&& self, int i, int j) -> double {
        if (i > j) return 1.0;
        double& slot = memo[static_cast<size_t>(i) * (m + 1) + j];
        if (slot >= 0.0) return slot;
        double total = 0.0;
        for (int t = i + 1; t <= j; t += 2)
            if (grp.op(gs[static_cast<size_t>(i)], gs[static_cast<size_t>(t)]) == grp.identity)
                total += self(self, i + 1, t - 1) * self(self, t + 1, j);
        return slot = total;
    };
    const double pairings = count(count, 0, m - 1);
    if (pairings == 0.0) return out;

    int prod = grp.identity;
    std::vector<int> prefix(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        prod = grp.op(prod, gs[static_cast<size_t>(j)]);
        prefix[static_cast<size_t>(j)] = prod;
    }
    if (prod != grp.identity) return out;
    for (int x = 0; x < npoints; ++x) {
        Complex val = pairings;
        for (int j = 0; j < m; ++j)
            val *= as[static_cast<size_t>(j)](
                action.act(grp.inverse(prefix[static_cast<size_t>(j)]), x));
        out(x) = val;
    }
    return out;
}

Eigen::VectorXcd model_conditional_expectation(const CrossedProductModel& model,
                                               const std::vector<int>& gs,
                                               const std::vector<Eigen::VectorXcd>& as, int k) {
    if (gs.size() != as.size())
        throw std::invalid_argument("model_conditional_expectation: factor count mismatch");
    auto v = model.vacuum();
    for (size_t j = gs.size(); j-- > 0;) {
        v = model.apply_pointwise(as[j], v);
        v = model.apply_generator(gs[j], k, v);
    }
    v = model.project_onto_subalgebra(v);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(model.action.npoints);
    for (const auto& [code, c] : v) out(static_cast<int>(code & 0xFF)) = c;
    return out;
}

}  // namespace qlab::gqg
