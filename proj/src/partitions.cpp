#include "qlab/partitions.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qlab {

Partition Partition::from_blocks(int m, std::vector<std::vector<int>> blocks) {
    if (m < 0) throw std::invalid_argument("partition: negative ground set size");
    std::vector<char> seen(static_cast<size_t>(m) + 1, 0);
    int count = 0;
    for (auto& b : blocks) {
        if (b.empty()) throw std::invalid_argument("partition: empty block");
        std::sort(b.begin(), b.end());
        for (int x : b) {
            if (x < 1 || x > m) throw std::invalid_argument("partition: element out of range");
            if (seen[static_cast<size_t>(x)]) throw std::invalid_argument("partition: repeated element");
            seen[static_cast<size_t>(x)] = 1;
            ++count;
        }
    }
    if (count != m) throw std::invalid_argument("partition: blocks do not cover the ground set");
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    Partition p;
    p.m = m;
    p.blocks = std::move(blocks);
    return p;
}

bool Partition::is_pair_partition() const {
    return std::all_of(blocks.begin(), blocks.end(),
                       [](const auto& b) { return b.size() == 2; });
}

bool Partition::is_pair_singleton() const {
    return std::all_of(blocks.begin(), blocks.end(),
                       [](const auto& b) { return b.size() == 1 || b.size() == 2; });
}

int Partition::pair_count() const {
    int n = 0;
    for (const auto& b : blocks) n += (b.size() == 2);
    return n;
}

int Partition::singleton_count() const {
    int n = 0;
    for (const auto& b : blocks) n += (b.size() == 1);
    return n;
}

std::string Partition::to_string() const {
    std::ostringstream os;
    os << '{';
    for (size_t i = 0; i < blocks.size(); ++i) {
        os << '{';
        for (size_t j = 0; j < blocks[i].size(); ++j) {
            if (j) os << ',';
            os << blocks[i][j];
        }
        os << '}';
        if (i + 1 < blocks.size()) os << ',';
    }
    os << '}';
    return os.str();
}

namespace {

void pair_rec(int m, std::vector<char>& used, std::vector<std::vector<int>>& acc,
              const PartitionSink& sink, bool allow_singletons) {
    int i = 1;
    while (i <= m && used[static_cast<size_t>(i)]) ++i;
    if (i > m) {
        Partition p;
        p.m = m;
        p.blocks = acc;
        std::sort(p.blocks.begin(), p.blocks.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
        sink(p);
        return;
    }
    used[static_cast<size_t>(i)] = 1;
    if (allow_singletons) {
        acc.push_back({i});
        pair_rec(m, used, acc, sink, allow_singletons);
        acc.pop_back();
    }
    for (int j = i + 1; j <= m; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        used[static_cast<size_t>(j)] = 1;
        acc.push_back({i, j});
        pair_rec(m, used, acc, sink, allow_singletons);
        acc.pop_back();
        used[static_cast<size_t>(j)] = 0;
    }
    used[static_cast<size_t>(i)] = 0;
}

void check_enumeration_guard(int m) {
    if (m < 0) throw std::invalid_argument("partition enumeration: negative m");
    if (m > 16) throw std::invalid_argument("partition enumeration: m > 16 refused (guard)");
}

}  // namespace

void for_each_pair_partition(int m, const PartitionSink& sink) {
    if (m < 0) throw std::invalid_argument("partition enumeration: negative m");
    if (m % 2 != 0) return;  // no full pairings of an odd ground set
    std::vector<char> used(static_cast<size_t>(m) + 1, 0);
    std::vector<std::vector<int>> acc;
    pair_rec(m, used, acc, sink, /*allow_singletons=*/false);
}

void for_each_pair_singleton_partition(int m, const PartitionSink& sink) {
    if (m < 0) throw std::invalid_argument("partition enumeration: negative m");
    std::vector<char> used(static_cast<size_t>(m) + 1, 0);
    std::vector<std::vector<int>> acc;
    pair_rec(m, used, acc, sink, /*allow_singletons=*/true);
}

void for_each_noncrossing_pair_partition(int m, const PartitionSink& sink) {
    for_each_pair_partition(m, [&](const Partition& p) {
        if (crossings(p) == 0) sink(p);
    });
}

std::vector<Partition> enumerate_pair_partitions(int m) {
    check_enumeration_guard(m);
    std::vector<Partition> out;
    for_each_pair_partition(m, [&](const Partition& p) { out.push_back(p); });
    return out;
}

std::vector<Partition> enumerate_pair_singleton_partitions(int m) {
    check_enumeration_guard(m);
    std::vector<Partition> out;
    for_each_pair_singleton_partition(m, [&](const Partition& p) { out.push_back(p); });
    return out;
}

std::vector<Partition> enumerate_noncrossing_pair_partitions(int m) {
    check_enumeration_guard(m);
    std::vector<Partition> out;
    for_each_noncrossing_pair_partition(m, [&](const Partition& p) { out.push_back(p); });
    return out;
}

long crossings(const Partition& sigma) {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> singles;
    for (const auto& b : sigma.blocks) {
        if (b.size() == 2) {
            pairs.emplace_back(b[0], b[1]);
        } else if (b.size() == 1) {
            singles.push_back(b[0]);
        } else {
            throw std::domain_error("crossings: block of size >= 3");
        }
    }
    long c = 0;
    for (size_t i = 0; i < pairs.size(); ++i) {
        for (size_t j = i + 1; j < pairs.size(); ++j) {
            auto [a, b] = pairs[i];
            auto [cc, d] = pairs[j];
            if ((a < cc && cc < b && b < d) || (cc < a && a < d && d < b)) ++c;
        }
        for (int s : singles) {
            if (pairs[i].first < s && s < pairs[i].second) ++c;
        }
    }
    return c;
}

Permutation Permutation::from_images(std::vector<int> images) {
    const int n = static_cast<int>(images.size());
    std::vector<char> seen(static_cast<size_t>(n) + 1, 0);
    for (int v : images) {
        if (v < 1 || v > n || seen[static_cast<size_t>(v)])
            throw std::invalid_argument("permutation: images are not a bijection");
        seen[static_cast<size_t>(v)] = 1;
    }
    return Permutation{std::move(images)};
}

long inversions(const Permutation& pi) {
    long c = 0;
    const auto& v = pi.images;
    for (size_t i = 0; i < v.size(); ++i)
        for (size_t j = i + 1; j < v.size(); ++j)
            if (v[i] > v[j]) ++c;
    return c;
}

Partition classify_indices(const std::vector<long>& labels) {
    std::map<long, std::vector<int>> by_label;
    for (size_t i = 0; i < labels.size(); ++i)
        by_label[labels[i]].push_back(static_cast<int>(i) + 1);
    std::vector<std::vector<int>> blocks;
    blocks.reserve(by_label.size());
    for (auto& [_, b] : by_label) blocks.push_back(std::move(b));
    return Partition::from_blocks(static_cast<int>(labels.size()), std::move(blocks));
}

}  // namespace qlab
