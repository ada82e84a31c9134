#include "superkz/superalgebra.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <fstream>

using namespace superkz;

namespace {

const Series kSeries[] = {Series::Tilde, Series::Plain, Series::Bar};
const XType kTypes[] = {XType::A, XType::B, XType::BDot, XType::C, XType::D};

IndexLabel L(int twice, bool barred = false) { return IndexLabel::make(twice, barred); }

SpQ unit(const AlgebraInstance& g, const IndexLabel& r, const IndexLabel& c) {
    std::vector<TripletQ> t{{g.space_pos(r), g.space_pos(c), Rational(1)}};
    SpQ a(static_cast<int>(g.space.size()), static_cast<int>(g.space.size()));
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

// gl(E|O) for type a; otherwise the (skew-)supersymmetric orthosymplectic dimension.
int oracle_dimension(Series s, XType x, int m, int n) {
    int even = 0, odd = 0;
    for (auto l : vector_space_labels(s, x, m, n)) (parity(l, x) ? odd : even)++;
    if (x == XType::A) return (even + odd) * (even + odd);
    const bool skew = x == XType::BDot || x == XType::C;
    const int so_even = even * (even - 1) / 2, sp_even = even * (even + 1) / 2;
    const int so_odd = odd * (odd - 1) / 2, sp_odd = odd * (odd + 1) / 2;
    return (skew ? sp_even + so_odd : so_even + sp_odd) + even * odd;
}

int elem_parity(const AlgebraInstance& g, int b) { return g.basis[b].parity; }

}  // namespace

TEST_CASE("defining form and supertrace examples") {
    CHECK(defining_form(XType::C, L(2), L(2, true)) == 1);
    CHECK(defining_form(XType::C, L(2, true), L(2)) == -1);
    CHECK(defining_form(XType::D, IndexLabel::zero_bar(), IndexLabel::zero_bar()) == 1);
    for (XType x : {XType::B, XType::BDot, XType::C, XType::D}) CHECK(defining_form(x, L(2), L(4)) == 0);
    CHECK_THROWS(defining_form(XType::A, L(2), L(2)));

    auto g = build_algebra(Series::Tilde, XType::A, 0, 2, false);
    CHECK(supertrace(*g, unit(*g, L(2), L(2))) == 1);
    CHECK(supertrace(*g, unit(*g, L(1), L(1))) == -1);
    CHECK(supertrace(*g, unit(*g, L(2), L(4))) == 0);
    CHECK(invariant_form(*g, unit(*g, L(2), L(4)), unit(*g, L(4), L(2))) == 1);
    CHECK(invariant_form(*g, unit(*g, L(1), L(3)), unit(*g, L(3), L(1))) == -1);
}

TEST_CASE("algebra examples") {
    auto gl2 = build_algebra(Series::Plain, XType::A, 0, 2, false);
    CHECK(gl2->dim() == 4);
    CHECK(gl2->num_roots() == 1);
    auto bar = build_algebra(Series::Bar, XType::A, 0, 2, false);
    CHECK(bar->dim() == 4);
    CHECK(bar->num_roots() == 1);
    CHECK(bar->space == std::vector<IndexLabel>{L(1), L(3)});
    for (const auto& b : bar->basis) CHECK(b.parity == 0);
    CHECK(bar->roots[0].eps == std::vector<int>{1, -1});
    auto sp4 = build_algebra(Series::Plain, XType::C, 1, 1, false);
    CHECK(sp4->dim() == 10);
}

TEST_CASE("dimensions agree with gl and osp formulas") {
    for (Series s : kSeries)
        for (XType x : kTypes)
            for (int m = 0; m <= 2; ++m)
                for (int n = 1; n <= 3; ++n) {
                    CAPTURE(to_string(s));
                    CAPTURE(to_string(x));
                    CAPTURE(m);
                    CAPTURE(n);
                    const int want = oracle_dimension(s, x, m, n);
                    CHECK(brute_force_dimension(s, x, m, n) == want);
                    if (m <= 1 && n <= 2) CHECK(build_algebra(s, x, m, n, false)->dim() == want);
                }
}

TEST_CASE("structure: form preservation, Cartan, roots") {
    for (Series s : kSeries)
        for (XType x : kTypes)
            for (int m = 0; m <= 1; ++m)
                for (int n = 1; n <= 2; ++n) {
                    CAPTURE(to_string(s));
                    CAPTURE(to_string(x));
                    CAPTURE(m);
                    CAPTURE(n);
                    auto g = build_algebra(s, x, m, n, true);
                    const int N = static_cast<int>(g->space.size());
                    if (x != XType::A) {
                        for (const auto& b : g->basis) {
                            MatQ a = to_dense(b.mat);
                            bool ok = true;
                            for (int p = 0; p < N; ++p)
                                for (int q = 0; q < N; ++q) {
                                    Rational lhs = 0, rhs = 0;
                                    for (int r = 0; r < N; ++r) {
                                        lhs += a(r, p) * defining_form(x, g->space[r], g->space[q]);
                                        rhs += defining_form(x, g->space[p], g->space[r]) * a(r, q);
                                    }
                                    const int sg = (b.parity * g->space_parity(p)) % 2 ? -1 : 1;
                                    if (lhs + sg * rhs != 0) ok = false;
                                }
                            CHECK(ok);
                        }
                    }
                    for (int j = 0; j < g->cartan_dim(); ++j) {
                        const IndexLabel l = g->cartan[j];
                        SpQ want = unit(*g, l, l);
                        if (x != XType::A) want = SpQ(want - unit(*g, l.bar(), l.bar()));
                        CHECK(equal(g->basis[g->cartan_index(j)].mat, want));
                        CHECK(g->form(j, j) == sign2j(l));
                    }
                    for (int r = 0; r < g->num_roots(); ++r) {
                        const auto& rd = g->roots[r];
                        CHECK(g->form(rd.raising, rd.lowering) == 1);
                        for (int j = 0; j < g->cartan_dim(); ++j) {
                            SpQ h = g->basis[j].mat;
                            SpQ e = g->basis[rd.raising].mat, f = g->basis[rd.lowering].mat;
                            CHECK(equal(superbracket(h, 0, e, rd.parity), SpQ(e * Rational(rd.eps[j]))));
                            CHECK(equal(superbracket(h, 0, f, rd.parity), SpQ(f * Rational(-rd.eps[j]))));
                        }
                    }
                }
}

TEST_CASE("brackets close, form is invariant and supersymmetric") {
    for (Series s : kSeries)
        for (XType x : kTypes) {
            auto g = build_algebra(s, x, 1, 2, true);
            const int d = g->dim();
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) {
                    const int pa = elem_parity(*g, a), pb = elem_parity(*g, b);
                    SpQ c = superbracket(g->basis[a].mat, pa, g->basis[b].mat, pb);
                    SpQ rebuilt(c.rows(), c.cols());
                    for (auto [e, q] : g->bracket(a, b).terms) rebuilt += g->basis[e].mat * q;
                    CHECK(equal(c, rebuilt));
                    const int sg = (pa * pb) % 2 ? -1 : 1;
                    CHECK(g->form(a, b) == sg * g->form(b, a));
                }
            for (int trial = 0; trial < 300; ++trial) {
                const int a = gen::uniform(0, d - 1), b = gen::uniform(0, d - 1), c = gen::uniform(0, d - 1);
                const auto& A = g->basis[a];
                const auto& B = g->basis[b];
                const auto& C = g->basis[c];
                SpQ ab = superbracket(A.mat, A.parity, B.mat, B.parity);
                SpQ bc = superbracket(B.mat, B.parity, C.mat, C.parity);
                CHECK(invariant_form(*g, ab, C.mat) == invariant_form(*g, A.mat, bc));
                // super Jacobi
                SpQ lhs = superbracket(A.mat, A.parity, bc, (B.parity + C.parity) % 2);
                SpQ ac = superbracket(A.mat, A.parity, C.mat, C.parity);
                SpQ r1 = superbracket(ab, (A.parity + B.parity) % 2, C.mat, C.parity);
                SpQ r2 = superbracket(B.mat, B.parity, ac, (A.parity + C.parity) % 2);
                const int sg = (A.parity * B.parity) % 2 ? -1 : 1;
                CHECK(equal(lhs, SpQ(r1 + r2 * Rational(sg))));
                // cocycle condition
                const Rational t1 = cocycle_tau(*g, ab, C.mat);
                const Rational t2 = cocycle_tau(*g, A.mat, bc);
                const Rational t3 = cocycle_tau(*g, B.mat, ac);
                CHECK(t1 == t2 - sg * t3);
            }
        }
}

TEST_CASE("cocycle and iota examples") {
    auto g = build_algebra(Series::Tilde, XType::A, 1, 1, false);
    CHECK(cocycle_tau(*g, unit(*g, L(-2), L(1)), unit(*g, L(1), L(-2))) == 1);
    CHECK(cocycle_tau(*g, unit(*g, L(2), L(2)), unit(*g, L(1), L(1))) == 0);
    CHECK(cocycle_tau(*g, unit(*g, L(1), L(2)), unit(*g, L(2), L(1))) == 0);
    CHECK(iota_k(*g, unit(*g, L(1), L(1))) == 1);
    CHECK(iota_k(*g, unit(*g, L(-2), L(-2))) == 0);
}

TEST_CASE("iota is a homomorphism onto the central extension") {
    struct Case {
        Series s;
        XType x;
        int m, n;
    };
    for (Case c : {Case{Series::Plain, XType::A, 0, 2}, Case{Series::Bar, XType::C, 1, 1},
                   Case{Series::Tilde, XType::B, 1, 1}}) {
        auto g = build_algebra(c.s, c.x, c.m, c.n, true);
        for (int a = 0; a < g->dim(); ++a)
            for (int b = 0; b < g->dim(); ++b) {
                const auto& A = g->basis[a];
                const auto& B = g->basis[b];
                SpQ ab = superbracket(A.mat, A.parity, B.mat, B.parity);
                // ι([A,B]) = [ι(A), ι(B)] = [A,B] + τ(A,B) K
                CHECK(iota_k(*g, ab) == cocycle_tau(*g, A.mat, B.mat));
                CHECK(g->bracket(a, b).k == cocycle_tau(*g, A.mat, B.mat));
            }
    }
}

TEST_CASE("golden algebra descriptions") {
    struct Case {
        Series s;
        XType x;
        int m, n;
        const char* file;
    };
    for (Case c : {Case{Series::Plain, XType::A, 0, 2, "algebra_plain_a_0_2.json"},
                   Case{Series::Bar, XType::C, 1, 1, "algebra_bar_c_1_1.json"},
                   Case{Series::Tilde, XType::B, 1, 1, "algebra_tilde_b_1_1.json"}}) {
        std::ifstream is(std::string(SUPERKZ_GOLDEN_DIR) + "/" + c.file);
        REQUIRE(is);
        CHECK(nlohmann::json::parse(is) == build_algebra(c.s, c.x, c.m, c.n, false)->to_json());
    }
}
