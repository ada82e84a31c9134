#pragma once

#include "superkz/weights.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace gen {

using superkz::Partition;
using superkz::Rational;

inline std::mt19937_64& rng() {
    static std::mt19937_64 r(20261015);
    return r;
}

inline int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline Rational rational(int num_range = 9, int den_max = 5) {
    return Rational(uniform(-num_range, num_range), uniform(1, den_max));
}

inline Partition partition(int max_parts, int max_part) {
    std::vector<int> p(uniform(0, max_parts));
    for (int& v : p) v = uniform(1, max_part);
    std::sort(p.rbegin(), p.rend());
    return Partition(p);
}

// All partitions with at most `total` boxes, generated by recursion on the largest part.
inline void partitions_rec(int left, int cap, std::vector<int>& cur, std::vector<Partition>& out) {
    out.emplace_back(cur);
    for (int v = std::min(left, cap); v >= 1; --v) {
        cur.push_back(v);
        partitions_rec(left - v, v, cur, out);
        cur.pop_back();
    }
}

inline std::vector<Partition> partitions_up_to(int total) {
    std::vector<Partition> out;
    std::vector<int> cur;
    partitions_rec(total, total, cur, out);
    return out;
}

}  // namespace gen
