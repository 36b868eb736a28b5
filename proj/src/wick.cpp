#include "qlab/wick.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace qlab::wick {

using fock::SpMat;
using Eigen::VectorXcd;
using Eigen::VectorXd;

FockOperator wick_word(const FockBasis& basis, double q, const VectorXcd& xi, int margin) {
    if (xi.size() != basis.size()) throw std::invalid_argument("wick_word: vector size mismatch");
    int top = 0;
    for (long i = 0; i < xi.size(); ++i)
        if (xi[i] != Complex(0.0)) top = std::max(top, basis.degree_of(i));
    if (top > basis.cutoff - margin)
        throw std::domain_error("wick_word: insufficient cutoff margin");

    // Per-word operators in degree order; the remainder of s(e_a) W(w) Omega
    // sits two degrees below, so the table is already available when needed.
    const long count = basis.degree_begin(top) + basis.degree_size(top);
    std::vector<SpMat> table;
    table.reserve(static_cast<size_t>(count));
    table.push_back(fock::identity_op(basis).mat);
    std::vector<fock::FockOperator> letter_fields;
    for (int a = 0; a < basis.dim; ++a) {
        VectorXcd e = VectorXcd::Zero(basis.dim);
        e[a] = 1.0;
        letter_fields.push_back(fock::field(basis, e, q));
    }
    for (long idx = 1; idx < count; ++idx) {
        fock::Word w = basis.word_at(idx);
        const int a = w.front();
        w.erase(w.begin());
        SpMat candidate = letter_fields[static_cast<size_t>(a)].mat * table[basis.index_of(w)];
        SpMat corrected = candidate;
        // subtract the lower-degree remainder of candidate * Omega
        for (SpMat::InnerIterator it(candidate, 0); it; ++it) {
            if (it.row() == idx) continue;
            corrected -= it.value() * table[it.row()];
        }
        table.push_back(std::move(corrected));
    }

    SpMat total(basis.size(), basis.size());
    for (long i = 0; i < count; ++i)
        if (xi[i] != Complex(0.0)) total += xi[i] * table[static_cast<size_t>(i)];
    return {basis, std::move(total)};
}

double f_sigma(const Partition& sigma, const std::vector<VectorXd>& hs, double q) {
    if (!sigma.is_pair_singleton())
        throw std::domain_error("f_sigma: partition must contain only singletons and pairs");
    if (static_cast<int>(hs.size()) != sigma.m)
        throw std::invalid_argument("f_sigma: vector count mismatch");
    double value = std::pow(q, static_cast<double>(crossings(sigma)));
    for (const auto& b : sigma.blocks)
        if (b.size() == 2)
            value *= hs[static_cast<size_t>(b[0]) - 1].dot(hs[static_cast<size_t>(b[1]) - 1]);
    return value;
}

namespace {

int homogeneous_degree(const FockBasis& basis, const VectorXcd& v, const char* what) {
    int deg = -1;
    for (long i = 0; i < v.size(); ++i) {
        if (v[i] == Complex(0.0)) continue;
        const int d = basis.degree_of(i);
        if (deg == -1) deg = d;
        else if (deg != d) throw std::invalid_argument(std::string(what) + ": not homogeneous");
    }
    return deg == -1 ? 0 : deg;
}

// Enumerate all ways to match a subset of u-positions injectively onto
// v-positions with equal letters; report each matching via the callback.
void matchings_rec(const fock::Word& u, const fock::Word& v, size_t l, std::vector<int>& match,
                   std::vector<char>& used, const std::function<void()>& emit) {
    if (l == u.size()) {
        emit();
        return;
    }
    match[l] = -1;
    matchings_rec(u, v, l + 1, match, used, emit);
    for (size_t r = 0; r < v.size(); ++r) {
        if (used[r] || u[l] != v[r]) continue;
        used[r] = 1;
        match[l] = static_cast<int>(r);
        matchings_rec(u, v, l + 1, match, used, emit);
        match[l] = -1;
        used[r] = 0;
    }
}

}  // namespace

std::vector<ExpansionTerm> wick_product_expansion(const FockBasis& basis, double q,
                                                  const VectorXcd& xi, const VectorXcd& eta) {
    const int m = homogeneous_degree(basis, xi, "wick_product_expansion: xi");
    const int mp = homogeneous_degree(basis, eta, "wick_product_expansion: eta");
    if (m + mp > basis.cutoff)
        throw std::domain_error("wick_product_expansion: insufficient cutoff margin");

    std::map<long, Complex> acc;
    for (long ui = basis.degree_begin(m); ui < basis.degree_begin(m) + basis.degree_size(m); ++ui) {
        if (xi[ui] == Complex(0.0)) continue;
        const fock::Word u = basis.word_at(ui);
        for (long vi = basis.degree_begin(mp); vi < basis.degree_begin(mp) + basis.degree_size(mp);
             ++vi) {
            if (eta[vi] == Complex(0.0)) continue;
            const fock::Word v = basis.word_at(vi);
            std::vector<int> match(static_cast<size_t>(m), -1);
            std::vector<char> used(static_cast<size_t>(mp), 0);
            matchings_rec(u, v, 0, match, used, [&] {
                std::vector<std::vector<int>> blocks;
                fock::Word reduced;
                for (int l = 0; l < m; ++l) {
                    if (match[static_cast<size_t>(l)] >= 0) {
                        blocks.push_back({l + 1, m + 1 + match[static_cast<size_t>(l)]});
                    } else {
                        blocks.push_back({l + 1});
                        reduced.push_back(u[static_cast<size_t>(l)]);
                    }
                }
                for (int r = 0; r < mp; ++r) {
                    if (!used[static_cast<size_t>(r)]) {
                        blocks.push_back({m + 1 + r});
                        reduced.push_back(v[static_cast<size_t>(r)]);
                    }
                }
                const Partition sigma = Partition::from_blocks(m + mp, std::move(blocks));
                const double coeff = std::pow(q, static_cast<double>(crossings(sigma)));
                acc[basis.index_of(reduced)] += coeff * xi[ui] * eta[vi];
            });
        }
    }
    std::vector<ExpansionTerm> terms;
    terms.reserve(acc.size());
    for (const auto& [idx, c] : acc)
        if (c != Complex(0.0)) terms.push_back({c, idx});
    return terms;
}

VectorXcd aggregate_expansion(const FockBasis& basis, const std::vector<ExpansionTerm>& terms) {
    VectorXcd out = VectorXcd::Zero(basis.size());
    for (const auto& t : terms) out[t.word_index] += t.coeff;
    return out;
}

VectorXcd replica_vector(const VectorXd& h, int copy, int base_dim, int n) {
    if (h.size() != base_dim) throw std::invalid_argument("replica_vector: dimension mismatch");
    if (copy < 0 || copy >= n) throw std::invalid_argument("replica_vector: copy out of range");
    VectorXcd out = VectorXcd::Zero(static_cast<long>(base_dim) * n);
    out.segment(static_cast<long>(copy) * base_dim, base_dim) = h.cast<Complex>();
    return out;
}

FockOperator un_embed(const FockBasis& replicated, double q, const std::vector<VectorXd>& hs,
                      int base_dim, int n) {
    if (replicated.dim != base_dim * n)
        throw std::invalid_argument("un_embed: replicated basis dimension mismatch");
    FockOperator op = fock::identity_op(replicated);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (const auto& h : hs) {
        SpMat factor(replicated.size(), replicated.size());
        for (int j = 0; j < n; ++j)
            factor += fock::field(replicated, replica_vector(h, j, base_dim, n), q).mat;
        op = op * FockOperator(replicated, SpMat(scale * factor));
    }
    return op;
}

namespace {
void injective_colorings(int blocks, int n, std::vector<int>& colors,
                         const std::function<void()>& emit) {
    if (static_cast<int>(colors.size()) == blocks) {
        emit();
        return;
    }
    for (int j = 0; j < n; ++j) {
        bool taken = false;
        for (int c : colors) taken = taken || (c == j);
        if (taken) continue;
        colors.push_back(j);
        injective_colorings(blocks, n, colors, emit);
        colors.pop_back();
    }
}
}  // namespace

FockOperator x_sigma_n(const FockBasis& replicated, double q, const Partition& sigma,
                       const std::vector<VectorXd>& hs, int base_dim, int n) {
    if (static_cast<int>(hs.size()) != sigma.m)
        throw std::invalid_argument("x_sigma_n: vector count mismatch");
    if (replicated.dim != base_dim * n)
        throw std::invalid_argument("x_sigma_n: replicated basis dimension mismatch");
    const int m = sigma.m;
    std::vector<int> block_of(static_cast<size_t>(m));
    for (size_t b = 0; b < sigma.blocks.size(); ++b)
        for (int pos : sigma.blocks[b]) block_of[static_cast<size_t>(pos) - 1] = static_cast<int>(b);

    SpMat total(replicated.size(), replicated.size());
    std::vector<int> colors;
    injective_colorings(static_cast<int>(sigma.blocks.size()), n, colors, [&] {
        FockOperator prod = fock::identity_op(replicated);
        for (int k = 0; k < m; ++k) {
            const int copy = colors[static_cast<size_t>(block_of[static_cast<size_t>(k)])];
            prod = prod * fock::field(replicated,
                                      replica_vector(hs[static_cast<size_t>(k)], copy, base_dim, n),
                                      q);
        }
        total += prod.mat;
    });
    const double scale = std::pow(static_cast<double>(n), -0.5 * m);
    return {replicated, SpMat(scale * total)};
}

namespace {

// Set partitions of the (factor, block) slots with no class containing two
// slots of the same factor, enumerated as class labels per slot.
void slot_patterns(int total_slots, int blocks_per_factor, std::vector<int>& cls, int nclasses,
                   const std::function<void(const std::vector<int>&, int)>& emit) {
    const int s = static_cast<int>(cls.size());
    if (s == total_slots) {
        emit(cls, nclasses);
        return;
    }
    const int factor = s / blocks_per_factor;
    for (int c = 0; c <= nclasses; ++c) {
        if (c < nclasses) {
            bool clash = false;
            for (int t = factor * blocks_per_factor; t < s; ++t)
                clash = clash || (cls[static_cast<size_t>(t)] == c);
            if (clash) continue;
        }
        cls.push_back(c);
        slot_patterns(total_slots, blocks_per_factor, cls, std::max(nclasses, c + 1), emit);
        cls.pop_back();
    }
}

}  // namespace

double sigma_word_norm4(const Partition& sigma, const std::vector<VectorXd>& hs, double q,
                        long n) {
    const int m = sigma.m;
    if (static_cast<int>(hs.size()) != m)
        throw std::invalid_argument("sigma_word_norm4: vector count mismatch");
    if (4 * m > 16)
        throw std::invalid_argument("sigma_word_norm4: word too long for exact pairing sum");
    const int big_m = 4 * m;
    const int blocks = static_cast<int>(sigma.blocks.size());
    std::vector<int> block_of(static_cast<size_t>(m));
    for (size_t b = 0; b < sigma.blocks.size(); ++b)
        for (int pos : sigma.blocks[b]) block_of[static_cast<size_t>(pos) - 1] = static_cast<int>(b);

    // global position -> (original word index, slot id); factors 0 and 2 are
    // the adjoint (reversed) copies in tau(x* x x* x)
    std::vector<int> orig(static_cast<size_t>(big_m)), slot(static_cast<size_t>(big_m));
    for (int p = 0; p < big_m; ++p) {
        const int factor = p / m, r = p % m;
        const int o = (factor % 2 == 0) ? (m - 1 - r) : r;
        orig[static_cast<size_t>(p)] = o;
        slot[static_cast<size_t>(p)] = factor * blocks + block_of[static_cast<size_t>(o)];
    }

    // precompute all pair partitions of the concatenated word with their
    // weight and pairwise inner products (color filter applied per pattern)
    struct PairingData {
        std::vector<std::pair<int, int>> pairs;  // 0-based global positions
        double weight;                           // q^{crossings} * product of inner products
    };
    std::vector<PairingData> pairings;
    for_each_pair_partition(big_m, [&](const Partition& pi) {
        PairingData pd;
        pd.weight = std::pow(q, static_cast<double>(crossings(pi)));
        for (const auto& b : pi.blocks) {
            const int l = b[0] - 1, r = b[1] - 1;
            pd.weight *= hs[static_cast<size_t>(orig[static_cast<size_t>(l)])].dot(
                hs[static_cast<size_t>(orig[static_cast<size_t>(r)])]);
            pd.pairs.emplace_back(l, r);
        }
        if (pd.weight != 0.0) pairings.push_back(std::move(pd));
    });

    double total = 0.0;
    std::vector<int> cls;
    slot_patterns(4 * blocks, blocks, cls, 0, [&](const std::vector<int>& classes, int k) {
        double falling = 1.0;
        for (int i = 0; i < k; ++i) falling *= static_cast<double>(n - i);
        if (falling == 0.0) return;
        double msum = 0.0;
        for (const auto& pd : pairings) {
            bool ok = true;
            for (const auto& [l, r] : pd.pairs)
                ok = ok && (classes[static_cast<size_t>(slot[static_cast<size_t>(l)])] ==
                            classes[static_cast<size_t>(slot[static_cast<size_t>(r)])]);
            if (ok) msum += pd.weight;
        }
        total += falling * msum;
    });
    return total * std::pow(static_cast<double>(n), -2.0 * m);
}

double decay_probe(const Partition& sigma, const std::vector<VectorXd>& hs, double q,
                   const std::vector<long>& ns) {
    bool has_big_block = false;
    for (const auto& b : sigma.blocks) has_big_block = has_big_block || (b.size() >= 3);
    if (!has_big_block)
        throw std::invalid_argument("decay_probe: pattern must contain a block of size >= 3");
    if (ns.size() < 2) throw std::invalid_argument("decay_probe: need at least two sample sizes");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (long n : ns) {
        const double x = std::log(static_cast<double>(n));
        const double y = 0.25 * std::log(sigma_word_norm4(sigma, hs, q, n));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double k = static_cast<double>(ns.size());
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

bool eigenvector_check(const FockBasis& basis, double q, const Partition& sigma,
                       const std::vector<VectorXd>& hs, double t, double tol) {
    if (!sigma.is_pair_singleton())
        throw std::domain_error("eigenvector_check: partition must be pair/singleton");
    if (static_cast<int>(hs.size()) != sigma.m)
        throw std::invalid_argument("eigenvector_check: vector count mismatch");
    // reduced word: coefficient f_sigma times the tensor of singleton vectors
    std::vector<int> singles;
    for (const auto& b : sigma.blocks)
        if (b.size() == 1) singles.push_back(b[0] - 1);
    const int s = static_cast<int>(singles.size());
    VectorXcd coeffs(1);
    coeffs[0] = f_sigma(sigma, hs, q);
    for (int i : singles) {
        VectorXcd next(coeffs.size() * basis.dim);
        for (long w = 0; w < coeffs.size(); ++w)
            for (int a = 0; a < basis.dim; ++a)
                next[w * basis.dim + a] = coeffs[w] * hs[static_cast<size_t>(i)][a];
        coeffs = std::move(next);
    }
    VectorXcd xi = VectorXcd::Zero(basis.size());
    xi.segment(basis.degree_begin(s), basis.degree_size(s)) = coeffs;

    const FockOperator w = wick_word(basis, q, xi);
    const VectorXcd v = w.mat.col(0);
    if ((v - xi).norm() > tol) return false;  // W(xi) Omega = xi must be exact
    const VectorXcd tv = fock::semigroup(basis, t).mat * v;
    return (tv - std::exp(-t * s) * v).norm() <= tol * std::max(1.0, v.norm());
}

}  // namespace qlab::wick
