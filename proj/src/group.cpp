#include "qlab/group.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qlab::gqg {

void FiniteGroup::validate() {
    if (order <= 0) throw std::invalid_argument("group: order must be positive");
    if (static_cast<int>(mul.size()) != order * order)
        throw std::invalid_argument("group: multiplication table size mismatch");
    for (int v : mul)
        if (v < 0 || v >= order) throw std::invalid_argument("group: table entry out of range");
    // identity
    identity = -1;
    for (int e = 0; e < order; ++e) {
        bool ok = true;
        for (int a = 0; a < order && ok; ++a) ok = (op(e, a) == a && op(a, e) == a);
        if (ok) {
            identity = e;
            break;
        }
    }
    if (identity < 0) throw std::invalid_argument("group: no identity element");
    // associativity
    for (int a = 0; a < order; ++a)
        for (int b = 0; b < order; ++b)
            for (int c = 0; c < order; ++c)
                if (op(op(a, b), c) != op(a, op(b, c)))
                    throw std::invalid_argument("group: associativity fails");
    // inverses
    inv.assign(static_cast<size_t>(order), -1);
    for (int a = 0; a < order; ++a) {
        for (int b = 0; b < order; ++b)
            if (op(a, b) == identity && op(b, a) == identity) inv[static_cast<size_t>(a)] = b;
        if (inv[static_cast<size_t>(a)] < 0)
            throw std::invalid_argument("group: element without inverse");
    }
    if (labels.empty())
        for (int a = 0; a < order; ++a) labels.push_back("g" + std::to_string(a));
    if (static_cast<int>(labels.size()) != order)
        throw std::invalid_argument("group: label count mismatch");
}

FiniteGroup FiniteGroup::cyclic(int n) {
    if (n <= 0) throw std::invalid_argument("cyclic: n must be positive");
    FiniteGroup g;
    g.order = n;
    g.mul.resize(static_cast<size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) g.mul[static_cast<size_t>(a) * n + b] = (a + b) % n;
    for (int a = 0; a < n; ++a) g.labels.push_back(std::to_string(a));
    g.validate();
    return g;
}

namespace {
FiniteGroup from_permutations(std::vector<std::vector<int>> perms,
                              std::vector<std::string> labels) {
    const int n = static_cast<int>(perms.size());
    FiniteGroup g;
    g.order = n;
    g.labels = std::move(labels);
    g.mul.resize(static_cast<size_t>(n) * n);
    auto find = [&](const std::vector<int>& p) {
        for (int i = 0; i < n; ++i)
            if (perms[static_cast<size_t>(i)] == p) return i;
        throw std::invalid_argument("permutation set is not closed");
    };
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            // (a*b)(x) = a(b(x))
            std::vector<int> comp(perms[0].size());
            for (size_t x = 0; x < comp.size(); ++x)
                comp[x] = perms[static_cast<size_t>(a)]
                               [static_cast<size_t>(perms[static_cast<size_t>(b)][x])];
            g.mul[static_cast<size_t>(a) * n + b] = find(comp);
        }
    }
    g.validate();
    return g;
}
}  // namespace

FiniteGroup FiniteGroup::symmetric3() {
    // permutations of {0,1,2} in lexicographic order; index 0 is the identity
    std::vector<std::vector<int>> perms;
    std::vector<int> p = {0, 1, 2};
    do {
        perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return from_permutations(perms, {"e", "(12)", "(01)", "(012)", "(021)", "(02)"});
}

FiniteGroup FiniteGroup::dihedral4() {
    // symmetries of the square acting on corners 0..3
    const std::vector<int> r = {1, 2, 3, 0};  // rotation
    const std::vector<int> s = {1, 0, 3, 2};  // reflection
    std::vector<std::vector<int>> perms = {{0, 1, 2, 3}};
    std::vector<std::string> labels = {"e"};
    auto compose = [](const std::vector<int>& a, const std::vector<int>& b) {
        std::vector<int> c(a.size());
        for (size_t x = 0; x < a.size(); ++x)
            c[x] = a[static_cast<size_t>(b[x])];
        return c;
    };
    std::vector<int> cur = {0, 1, 2, 3};
    const std::string rname = "r";
    for (int k = 1; k < 4; ++k) {
        cur = compose(r, cur);
        perms.push_back(cur);
        labels.push_back(rname + std::to_string(k));
    }
    cur = s;
    perms.push_back(cur);
    labels.push_back("s");
    for (int k = 1; k < 4; ++k) {
        cur = compose(r, cur);
        perms.push_back(cur);
        labels.push_back("r" + std::to_string(k) + "s");
    }
    return from_permutations(perms, labels);
}

FiniteGroup FiniteGroup::klein4() {
    FiniteGroup g;
    g.order = 4;
    // Z2 x Z2 with xor composition
    g.mul.resize(16);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) g.mul[static_cast<size_t>(a) * 4 + b] = a ^ b;
    g.labels = {"e", "a", "b", "ab"};
    g.validate();
    return g;
}

FiniteGroup FiniteGroup::from_json_text(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    FiniteGroup g;
    g.order = j.at("order").get<int>();
    g.mul = j.at("mul").get<std::vector<int>>();
    if (j.contains("labels")) g.labels = j.at("labels").get<std::vector<std::string>>();
    g.validate();
    return g;
}

FiniteGroup FiniteGroup::builtin_or_file(const std::string& name_or_path) {
    if (name_or_path == "z2") return cyclic(2);
    if (name_or_path == "z3") return cyclic(3);
    if (name_or_path == "z4") return cyclic(4);
    if (name_or_path == "z6") return cyclic(6);
    if (name_or_path == "s3") return symmetric3();
    if (name_or_path == "d4") return dihedral4();
    if (name_or_path == "klein4") return klein4();
    std::ifstream in(name_or_path);
    if (!in) throw std::invalid_argument("group: unknown builtin and unreadable file: " +
                                         name_or_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::vector<int> commutator_subgroup(const FiniteGroup& g) {
    std::set<int> elems = {g.identity};
    for (int a = 0; a < g.order; ++a)
        for (int b = 0; b < g.order; ++b)
            elems.insert(g.op(g.op(a, b), g.op(g.inverse(a), g.inverse(b))));
    bool grew = true;
    while (grew) {
        grew = false;
        std::set<int> next = elems;
        for (int a : elems)
            for (int b : elems)
                if (next.insert(g.op(a, b)).second) grew = true;
        elems = std::move(next);
    }
    return {elems.begin(), elems.end()};
}

void GroupAction::validate() const {
    if (static_cast<int>(perm.size()) != group.order)
        throw std::invalid_argument("action: one permutation per group element required");
    for (const auto& p : perm) {
        if (static_cast<int>(p.size()) != npoints)
            throw std::invalid_argument("action: permutation size mismatch");
        std::vector<char> seen(static_cast<size_t>(npoints), 0);
        for (int x : p) {
            if (x < 0 || x >= npoints || seen[static_cast<size_t>(x)])
                throw std::invalid_argument("action: not a permutation");
            seen[static_cast<size_t>(x)] = 1;
        }
    }
    for (int a = 0; a < group.order; ++a)
        for (int b = 0; b < group.order; ++b)
            for (int x = 0; x < npoints; ++x)
                if (act(group.op(a, b), x) != act(a, act(b, x)))
                    throw std::invalid_argument("action: homomorphism property fails");
}

GroupAction GroupAction::trivial(FiniteGroup g, int npoints) {
    GroupAction a;
    a.group = std::move(g);
    a.npoints = npoints;
    std::vector<int> id(static_cast<size_t>(npoints));
    std::iota(id.begin(), id.end(), 0);
    a.perm.assign(static_cast<size_t>(a.group.order), id);
    a.validate();
    return a;
}

GroupAction GroupAction::translation(FiniteGroup g) {
    GroupAction a;
    a.npoints = g.order;
    a.perm.resize(static_cast<size_t>(g.order));
    for (int h = 0; h < g.order; ++h) {
        a.perm[static_cast<size_t>(h)].resize(static_cast<size_t>(g.order));
        for (int x = 0; x < g.order; ++x)
            a.perm[static_cast<size_t>(h)][static_cast<size_t>(x)] = g.op(h, x);
    }
    a.group = std::move(g);
    a.validate();
    return a;
}

}  // namespace qlab::gqg
