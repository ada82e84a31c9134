#include "superkz/weights.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <set>

using namespace superkz;

namespace {

IndexLabel L(int twice) { return IndexLabel::make(twice); }

DominantWeightSpec spec(std::vector<int> parts, Rational d = 0, std::vector<Rational> head = {}) {
    return {Partition(std::move(parts)), d, std::move(head)};
}

// Column lengths, read off the diagram cell by cell.
Partition transpose(const Partition& mu) {
    std::vector<int> cols;
    for (int i = 0; i < mu.length(); ++i)
        for (int j = 0; j < mu[i]; ++j) {
            if (j >= static_cast<int>(cols.size())) cols.push_back(0);
            ++cols[j];
        }
    return Partition(cols);
}

// θ_{i−½}: cells of column i on or below the diagonal; θ_i: cells of row i strictly right of it.
std::vector<int> theta_by_cells(const Partition& mu, int count) {
    std::vector<int> out(count, 0);
    for (int r = 0; r < mu.length(); ++r)
        for (int c = 0; c < mu[r]; ++c) {
            const int slot = r >= c ? 2 * c : 2 * r + 1;
            if (slot < count) ++out[slot];
        }
    return out;
}

const XType kTypes[] = {XType::A, XType::B, XType::BDot, XType::C, XType::D};

}  // namespace

TEST_CASE("conjugate and theta examples") {
    CHECK(conjugate(Partition({3, 2})) == Partition({2, 2, 1}));
    CHECK(conjugate(Partition()) == Partition());
    CHECK(conjugate(Partition({1, 1, 1})) == Partition({3}));
    CHECK(frobenius_theta(Partition({3, 2}), 6) == std::vector<int>{2, 2, 1, 0, 0, 0});
    CHECK(frobenius_theta(Partition(), 5) == std::vector<int>(5, 0));
    CHECK(frobenius_theta(Partition({1}), 4) == std::vector<int>{1, 0, 0, 0});
}

TEST_CASE("combinatorics: exhaustive up to 8 boxes") {
    const int counts[] = {1, 1, 2, 3, 5, 7, 11, 15, 22};
    for (int k = 0; k <= 8; ++k) CHECK(static_cast<int>(partitions_of(k).size()) == counts[k]);
    for (const auto& mu : gen::partitions_up_to(8)) {
        CAPTURE(mu.str());
        CHECK(conjugate(mu) == transpose(mu));
        CHECK(conjugate(conjugate(mu)) == mu);
        auto th = frobenius_theta(mu, 20);
        CHECK(th == theta_by_cells(mu, 20));
        int total = 0;
        for (int v : th) total += v;
        CHECK(total == mu.size());
    }
}

TEST_CASE("make_weight examples") {
    CHECK(make_weight(spec({1}), Series::Plain, XType::A, 0, 2) == epsilon(L(2)));
    CHECK(make_weight(spec({1}), Series::Bar, XType::A, 0, 2) == epsilon(L(1)));
    CHECK(make_weight(spec({1}), Series::Tilde, XType::A, 0, 2) == epsilon(L(1)));
    CHECK(make_weight(spec({2}), Series::Bar, XType::A, 0, 2) == epsilon(L(1)) + epsilon(L(3)));
    CHECK(make_weight(spec({2}), Series::Tilde, XType::A, 0, 2) == epsilon(L(1)) + epsilon(L(2)));
    CHECK_THROWS_AS(make_weight(spec({1, 1, 1}), Series::Plain, XType::A, 0, 2), NotRepresentable);
    CHECK_THROWS_AS(make_weight(spec({3}), Series::Bar, XType::A, 0, 2), NotRepresentable);
    CHECK_THROWS(validate_spec(spec({1}, 0, {Rational(1, 2)}), XType::BDot, 1));
    Weight w = make_weight(spec({2, 1}, Rational(1, 3), {Rational(5, 2)}), Series::Plain, XType::C, 1, 3);
    CHECK(w[L(-2)] == Rational(5, 2));
    CHECK(w[L(2)] == 2);
    CHECK(w[L(4)] == 1);
    CHECK(w.level == Rational(1, 3));
}

TEST_CASE("ring_weight examples") {
    Weight p = ring_weight(spec({1}, 1), Series::Plain, XType::A, 0, 2);
    CHECK(p[L(2)] == 0);
    CHECK(p[L(4)] == -1);
    CHECK(p.level == 1);
    Weight b = ring_weight(spec({1}, 1), Series::Bar, XType::A, 0, 1);
    CHECK(b == epsilon(L(1), 2) + Weight{{}, 1});
    for (Series s : {Series::Tilde, Series::Plain, Series::Bar})
        CHECK(ring_weight(spec({2, 1}, 0, {3}), s, XType::C, 1, 3) == make_weight(spec({2, 1}, 0, {3}), s, XType::C, 1, 3));
}

TEST_CASE("h* form and rho examples") {
    Weight lam0{{}, 1};
    CHECK(hstar_form(epsilon(L(2)), epsilon(L(2))) == 1);
    CHECK(hstar_form(epsilon(L(1)), epsilon(L(1))) == -1);
    CHECK(hstar_form(lam0, epsilon(L(-2))) == 0);
    CHECK(hstar_form(lam0, epsilon(L(2))) == -1);
    CHECK(hstar_form(lam0, lam0) == 0);

    CHECK(r_x(XType::A, 3) == -1);
    CHECK(r_x(XType::B, 2) == Rational(-5, 2));
    CHECK(r_x(XType::BDot, 2) == Rational(-5, 2));
    CHECK(r_x(XType::C, 2) == -3);
    CHECK(r_x(XType::D, 2) == -2);

    auto p = rho_data(Series::Plain, XType::A, 0, 2);
    CHECK(p.varrho.at(L(2)) == -1);
    CHECK(p.varrho.at(L(4)) == -2);
    auto b = rho_data(Series::Bar, XType::A, 0, 2);
    CHECK(b.varrho.at(L(1)) == 0);
    CHECK(b.varrho.at(L(3)) == 1);
    auto t = rho_data(Series::Tilde, XType::A, 0, 2);
    CHECK(t.varrho.at(L(1)) == 0);
}

TEST_CASE("casimir scalar examples") {
    for (Series s : {Series::Tilde, Series::Plain, Series::Bar}) {
        CHECK(casimir_scalar(spec({1}), s, XType::A, 0, 3) == -1);
        CHECK(casimir_scalar(spec({2}), s, XType::A, 0, 3) == 0);
        CHECK(casimir_scalar(spec({}, 0, {0, 0}), s, XType::C, 2, 3) == 0);
    }
}

TEST_CASE("property: casimir scalar agrees across series; make_weight injective") {
    for (XType x : kTypes) {
        std::set<std::string> seen_specs;
        std::map<Series, std::set<std::string>> seen;
        for (int trial = 0; trial < 200; ++trial) {
            const int m = gen::uniform(0, 2);
            DominantWeightSpec sp;
            sp.lambda_plus = gen::partition(6, 6);
            sp.d = gen::rational();
            for (int i = 0; i < m; ++i) sp.head.push_back(x == XType::BDot ? Rational(gen::uniform(-5, 5)) : gen::rational());
            const int n = 7;
            const Rational c = casimir_scalar(sp, Series::Plain, x, m, n);
            CHECK(casimir_scalar(sp, Series::Bar, x, m, n) == c);
            CHECK(casimir_scalar(sp, Series::Tilde, x, m, n) == c);
            // distinct specs must give distinct weights at fixed series and rank
            const std::string key = std::to_string(m) + to_json(sp).dump();
            if (!seen_specs.insert(key).second) continue;
            for (Series s : {Series::Tilde, Series::Plain, Series::Bar}) {
                const std::string w = std::to_string(m) + make_weight(sp, s, x, m, n).str();
                CHECK(seen[s].insert(w).second);
            }
        }
    }
}

TEST_CASE("Xi membership and parity") {
    Weight w = epsilon(L(2)) + epsilon(L(4));
    CHECK(weight_in_Xi(w, Series::Plain, XType::A, 0, 2));
    CHECK_FALSE(weight_in_Xi(w, Series::Bar, XType::A, 0, 2));
    CHECK(weight_in_Xi(w, Series::Tilde, XType::A, 0, 2));
    CHECK_FALSE(weight_in_Xi(w, Series::Plain, XType::A, 0, 1));
    CHECK_FALSE(weight_in_Xi(epsilon(L(2), -1), Series::Plain, XType::A, 0, 2));
    CHECK_FALSE(weight_in_Xi(epsilon(L(-2), Rational(1, 2)), Series::Plain, XType::BDot, 1, 2));
    CHECK(weight_in_Xi(epsilon(L(-2), Rational(1, 2)), Series::Plain, XType::C, 1, 2));
    CHECK(weight_parity(epsilon(L(1)), XType::A) == 1);
    CHECK(weight_parity(epsilon(L(1), 2), XType::A) == 0);
    CHECK(weight_parity(epsilon(L(2), 3), XType::A) == 0);
}
