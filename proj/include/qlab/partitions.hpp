#pragma once

#include <functional>
#include <string>
#include <vector>

namespace qlab {

// A set partition of {1, ..., m}.  Blocks are kept canonical: each block
// sorted ascending, blocks ordered by their least element.
struct Partition {
    int m = 0;
    std::vector<std::vector<int>> blocks;

    // Validates that the blocks tile {1,...,m} exactly, then canonicalizes.
    // Throws std::invalid_argument on malformed input.
    static Partition from_blocks(int m, std::vector<std::vector<int>> blocks);

    bool operator==(const Partition&) const = default;

    bool is_pair_partition() const;    // every block has size 2
    bool is_pair_singleton() const;    // every block has size 1 or 2
    int pair_count() const;
    int singleton_count() const;
    std::string to_string() const;
};

using PartitionSink = std::function<void(const Partition&)>;

// Streaming enumeration of all pair partitions of {1,...,m} (m even; odd m
// yields nothing).  Emission order is canonical: the block containing the
// smallest unplaced element is chosen first, partners ascending.
void for_each_pair_partition(int m, const PartitionSink& sink);

// Streaming enumeration of all pair/singleton partitions of {1,...,m}.
// For each smallest unplaced element the singleton branch is emitted before
// the pair branches.
void for_each_pair_singleton_partition(int m, const PartitionSink& sink);

// Pair partitions with zero crossings, same emission order as the pair
// enumeration they are filtered from.
void for_each_noncrossing_pair_partition(int m, const PartitionSink& sink);

// Materializing wrappers.  Guarded: m > 16 throws std::invalid_argument
// instead of exhausting memory.
std::vector<Partition> enumerate_pair_partitions(int m);
std::vector<Partition> enumerate_pair_singleton_partitions(int m);
std::vector<Partition> enumerate_noncrossing_pair_partitions(int m);

// Number of crossings of a pair/singleton partition:
//   - two pairs {a<b}, {c<d} cross iff a < c < b < d or c < a < d < b;
//   - a pair {l<r} and a singleton {i} cross iff l < i < r.
// Throws std::domain_error if any block has size >= 3.
long crossings(const Partition& sigma);

// A permutation of {1,...,n}; images[i] is the image of i+1 (1-based values).
struct Permutation {
    std::vector<int> images;
    static Permutation from_images(std::vector<int> images);  // validates
    int size() const { return static_cast<int>(images.size()); }
};

// Number of inversions: pairs i < j with images[i] > images[j].
long inversions(const Permutation& pi);

// Partition of {1,...,m} whose blocks collect equal labels:
// i and j share a block iff labels[i-1] == labels[j-1].
Partition classify_indices(const std::vector<long>& labels);

}  // namespace qlab
