#pragma once

#include <string>
#include <vector>

namespace qlab::gqg {

// Finite group given by its full multiplication table (row-major).
struct FiniteGroup {
    int order = 0;
    std::vector<int> mul;
    std::vector<int> inv;
    int identity = 0;
    std::vector<std::string> labels;

    int op(int a, int b) const { return mul[static_cast<size_t>(a) * order + b]; }
    int inverse(int a) const { return inv[static_cast<size_t>(a)]; }

    // Checks closure, associativity, identity, and inverses on the full table;
    // throws std::invalid_argument on violation.  Also (re)builds inv/identity.
    void validate();

    static FiniteGroup cyclic(int n);
    static FiniteGroup symmetric3();
    static FiniteGroup dihedral4();
    static FiniteGroup klein4();

    // JSON object {order, mul: row-major table, labels?: [...]}.
    static FiniteGroup from_json_text(const std::string& text);
    // Builtin names: z2, z3, z4, z6, s3, d4, klein4; anything else is read as
    // a JSON file path.
    static FiniteGroup builtin_or_file(const std::string& name_or_path);
};

// Closure of {ghg^{-1}h^{-1}} under multiplication.
std::vector<int> commutator_subgroup(const FiniteGroup& g);

// Trace-preserving action of G on a finite point set by permutations.
struct GroupAction {
    FiniteGroup group;
    int npoints = 1;
    std::vector<std::vector<int>> perm;  // perm[g][x]

    int act(int g, int x) const { return perm[static_cast<size_t>(g)][static_cast<size_t>(x)]; }
    void validate() const;  // homomorphism property on the full table

    static GroupAction trivial(FiniteGroup g, int npoints = 1);
    static GroupAction translation(FiniteGroup g);  // x -> g x on G itself
};

}  // namespace qlab::gqg
