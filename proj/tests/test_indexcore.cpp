#include "superkz/indexcore.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <tuple>

using namespace superkz;

namespace {

IndexLabel L(int twice, bool barred = false) { return IndexLabel::make(twice, barred); }

// Independent rank of a label in the displayed order: barred positives (descending), barred
// negatives, 0̄, unbarred negatives, unbarred positives (ascending).
std::tuple<int, int> rank_key(const IndexLabel& l) {
    if (l.is_zero_bar()) return {2, 0};
    if (l.barred) return l.twice > 0 ? std::tuple{0, -l.twice} : std::tuple{1, -l.twice};
    return l.twice < 0 ? std::tuple{3, l.twice} : std::tuple{4, l.twice};
}

std::vector<IndexLabel> full_set(int m, int n) {
    std::vector<IndexLabel> out{IndexLabel::zero_bar()};
    for (auto l : build_index_set(Series::Tilde, true, m, n)) {
        out.push_back(l);
        out.push_back(l.bar());
    }
    return out;
}

}  // namespace

TEST_CASE("index sets: examples") {
    auto t = build_index_set(Series::Tilde, true, 1, 2);
    CHECK(t == std::vector<IndexLabel>{L(-2), L(1), L(2), L(3), L(4)});
    CHECK(build_index_set(Series::Plain, true, 0, 3) == std::vector<IndexLabel>{L(2), L(4), L(6)});
    CHECK(build_index_set(Series::Bar, true, 2, 1) == std::vector<IndexLabel>{L(-4), L(-2), L(1)});
    CHECK_THROWS(build_index_set(Series::Plain, true, 1, 0));
    CHECK_THROWS(build_index_set(Series::Plain, true, -1, 2));
}

TEST_CASE("index sets: sizes, union and intersection") {
    for (int m = 0; m <= 4; ++m)
        for (int n = 1; n <= 6; ++n) {
            auto t = build_index_set(Series::Tilde, true, m, n);
            auto p = build_index_set(Series::Plain, true, m, n);
            auto b = build_index_set(Series::Bar, true, m, n);
            CHECK(t.size() == static_cast<std::size_t>(m + 2 * n));
            CHECK(p.size() == static_cast<std::size_t>(m + n));
            CHECK(b.size() == static_cast<std::size_t>(m + n));
            CHECK(std::is_sorted(t.begin(), t.end()));
            std::set<IndexLabel> u(p.begin(), p.end()), inter;
            u.insert(b.begin(), b.end());
            CHECK(std::vector<IndexLabel>(u.begin(), u.end()) == t);
            std::set_intersection(p.begin(), p.end(), b.begin(), b.end(), std::inserter(inter, inter.end()));
            CHECK(static_cast<int>(inter.size()) == m);
            for (auto l : inter) CHECK(l.is_head());
        }
}

TEST_CASE("order: strict total order matching the displayed order") {
    for (int m = 0; m <= 3; ++m)
        for (int n = 1; n <= 4; ++n) {
            auto s = full_set(m, n);
            for (auto a : s)
                for (auto b : s) {
                    const int rel = (a < b) + (b < a) + (a == b);
                    CHECK(rel == 1);
                    CHECK((a < b) == (rank_key(a) < rank_key(b)));
                    for (auto c : s)
                        if (a < b && b < c) CHECK(a < c);
                }
        }
    CHECK(L(1, true) < L(-2, true));
    CHECK(L(-2, true) < L(-4, true));
    CHECK(L(-4, true) < IndexLabel::zero_bar());
    CHECK(IndexLabel::zero_bar() < L(-4));
    CHECK(L(-2) < L(1));
    CHECK(L(4, true) < L(3, true));
}

TEST_CASE("parity") {
    for (XType x : {XType::A, XType::B, XType::BDot, XType::C, XType::D}) {
        CHECK(parity(L(6), x) == 0);
        CHECK(parity(L(6, true), x) == 0);
        CHECK(parity(L(-2), x) == 0);
        CHECK(parity(L(1), x) == 1);
        CHECK(parity(L(5, true), x) == 1);
    }
    CHECK(parity(IndexLabel::zero_bar(), XType::C) == 1);
    CHECK(parity(IndexLabel::zero_bar(), XType::BDot) == 1);
    CHECK(parity(IndexLabel::zero_bar(), XType::D) == 0);
    CHECK(parity(IndexLabel::zero_bar(), XType::B) == 0);
    CHECK_THROWS(parity(IndexLabel::zero_bar(), XType::A));
}

TEST_CASE("labels: construction and text round trip") {
    CHECK_THROWS(IndexLabel::make(0, false));
    CHECK_THROWS(IndexLabel::make(-3, false));
    for (auto l : full_set(2, 3)) CHECK(IndexLabel::parse(l.str()) == l);
    CHECK(IndexLabel::parse("3/2") == L(3));
    CHECK(IndexLabel::parse("bar(-1)") == L(-2, true));
    for (auto s : {"tilde", "plain", "bar"}) CHECK(to_string(parse_series(s)) == s);
    for (auto s : {"a", "b", "b_bullet", "c", "d"}) CHECK(to_string(parse_xtype(s)) == s);
    CHECK_THROWS(parse_series("hat"));
}
