#include "superkz/kz.hpp"
#include "superkz/modules.hpp"
#include "superkz/tensor.hpp"

#include <doctest.h>

#include <map>

using namespace superkz;

namespace {

IndexLabel L(int twice) { return IndexLabel::make(twice); }
MatQ eye(int n) { return MatQ::Identity(n, n); }

// Cartan part of [E_β, E^β] evaluated on a weight, K acting by the level.
Rational h_value(const AlgebraInstance& g, int root, const Weight& w) {
    const Bracket& br = g.bracket(g.roots[root].raising, g.roots[root].lowering);
    Rational v = br.k * w.level;
    for (auto [t, c] : br.terms)
        if (g.basis[t].kind == ElementKind::Cartan) v += c * w[g.cartan[g.basis[t].slot]];
    return v;
}

using Image = std::map<int, MatQ>;

void add_to(Image& img, std::pair<int, MatQ> r, const Rational& c) {
    if (r.first < 0) return;
    auto it = img.find(r.first);
    if (it == img.end()) img.emplace(r.first, r.second * c);
    else it->second += r.second * c;
}

// ρ(a)ρ(b) − (−1)^{|a||b|}ρ(b)ρ(a) = ρ([a,b]) + τ(a,b)·level on every block of depth ≤ max_depth.
// Pairs whose images leave the truncation are skipped; at least one pair must be checked.
bool is_representation(const WeightModule& m, int max_depth) {
    const auto& g = *m.algebra;
    int checked = 0;
    for (std::size_t blk = 0; blk < m.blocks.size(); ++blk) {
        if (m.blocks[blk].depth > max_depth || m.blocks[blk].dim == 0) continue;
        const MatQ id = eye(m.blocks[blk].dim);
        for (int a = 0; a < g.dim(); ++a)
            for (int b = 0; b < g.dim(); ++b) {
                const int sg = (g.basis[a].parity * g.basis[b].parity) % 2 ? -1 : 1;
                Image lhs, rhs;
                const Bracket& br = g.bracket(a, b);
                try {
                    add_to(lhs, apply_word(m, {a, b}, static_cast<int>(blk), id), 1);
                    add_to(lhs, apply_word(m, {b, a}, static_cast<int>(blk), id), -sg);
                    for (auto [e, c] : br.terms) add_to(rhs, apply_word(m, {e}, static_cast<int>(blk), id), c);
                } catch (const std::runtime_error&) {
                    continue;
                }
                ++checked;
                if (br.k != 0) add_to(rhs, {static_cast<int>(blk), id}, br.k * m.level());
                for (auto& [t, mat] : lhs) {
                    auto it = rhs.find(t);
                    MatQ diff = it == rhs.end() ? mat : MatQ(mat - it->second);
                    if (!diff.isZero()) return false;
                }
                for (auto& [t, mat] : rhs)
                    if (!lhs.count(t) && !mat.isZero()) return false;
            }
    }
    return checked > 0;
}

bool parity_compatible(const WeightModule& m) {
    const auto& g = *m.algebra;
    for (int a = 0; a < g.dim(); ++a)
        for (std::size_t blk = 0; blk < m.blocks.size(); ++blk) {
            const auto& act = m.act(a, static_cast<int>(blk));
            if (act.target < 0 || act.lost || m.blocks[blk].dim == 0 || m.blocks[act.target].dim == 0) continue;
            if (m.blocks[act.target].parity != (m.blocks[blk].parity + g.basis[a].parity) % 2) return false;
        }
    return true;
}

}  // namespace

TEST_CASE("gl(2) Verma module") {
    auto g = build_algebra(Series::Plain, XType::A, 0, 2, false);
    auto v = build_verma(g, epsilon(L(2)), 2);
    REQUIRE(v->blocks.size() == 3);
    CHECK(v->blocks[v->find_block(epsilon(L(2)))].dim == 1);
    CHECK(v->blocks[v->find_block(epsilon(L(4)))].dim == 1);
    CHECK(v->blocks[v->find_block(epsilon(L(4), 2) - epsilon(L(2)))].dim == 1);
    CHECK(is_representation(*v, 0));
    auto v0 = build_verma(g, epsilon(L(2)), 0);
    CHECK(v0->total_dim() == 1);
    CHECK(v0->act(g->lowering_index(0), 0).lost);

    auto form = contravariant_form(*v);
    CHECK(form[v->find_block(epsilon(L(4)))](0, 0) == 1);
    auto triv = build_verma(g, Weight{}, 1);
    CHECK(contravariant_form(*triv)[1](0, 0) == 0);
}

TEST_CASE("gl(1|1): odd lowering squares to zero") {
    auto g = build_algebra(Series::Tilde, XType::A, 0, 1, false);
    REQUIRE(g->num_roots() == 1);
    CHECK(g->roots[0].parity == 1);
    const Weight hw = epsilon(L(1), Rational(2, 3)) + epsilon(L(2), Rational(1, 5));
    auto v = build_verma(g, hw, 2);
    CHECK(v->total_dim() == 2);
    CHECK(is_representation(*v, 2));
    auto form = contravariant_form(*v);
    CHECK(form[v->find_block(hw - epsilon(L(1)) + epsilon(L(2)))](0, 0) == h_value(*g, 0, hw));

    // h-eigenvalue zero: the irreducible quotient is one-dimensional
    const Bracket& br = g->bracket(g->roots[0].raising, g->roots[0].lowering);
    Rational c1 = 0, c2 = 0;
    for (auto [t, c] : br.terms) (g->cartan[g->basis[t].slot] == L(1) ? c1 : c2) += c;
    const Weight atyp = epsilon(L(1), c2) - epsilon(L(2), c1);
    REQUIRE(h_value(*g, 0, atyp) == 0);
    CHECK(irreducible_quotient(build_verma(g, atyp, 2))->total_dim() == 1);
    CHECK(irreducible_quotient(build_verma(g, hw, 2))->total_dim() == 2);
}

TEST_CASE("radical equals the kernel of the contravariant form") {
    struct Case {
        Series s;
        XType x;
        int m, n;
        Weight hw;
    };
    const std::vector<Case> cases = {
        {Series::Plain, XType::A, 0, 2, epsilon(L(2))},
        {Series::Plain, XType::A, 0, 3, epsilon(L(2), 2) + epsilon(L(4))},
        {Series::Tilde, XType::A, 0, 1, epsilon(L(1)) + epsilon(L(2), -1)},
        {Series::Bar, XType::C, 1, 1, epsilon(L(-2), 1) + epsilon(L(1))},
        {Series::Plain, XType::D, 2, 1, epsilon(L(-4), 1) + epsilon(L(-2), 1)},
    };
    for (const auto& c : cases) {
        auto v = build_verma(build_algebra(c.s, c.x, c.m, c.n, false), c.hw, 3);
        auto form = contravariant_form(*v);
        auto rad = radical(*v);
        for (std::size_t b = 0; b < v->blocks.size(); ++b) CHECK(same_span(rad[b], nullspace(form[b])));
        CHECK(parity_compatible(*v));
        auto q = irreducible_quotient(v);
        CHECK(is_representation(*q, 1));
        CHECK(parity_compatible(*q));
    }
}

TEST_CASE("parabolic Verma modules") {
    auto g = build_algebra(Series::Plain, XType::A, 0, 2, false);
    auto p = parabolic_verma(g, epsilon(L(2)), 3);
    CHECK(p->total_dim() == 2);
    CHECK(is_representation(*p, 1));
    CHECK(same_module(*parabolic_verma(g, epsilon(L(2)), 3, std::vector<int>{}), *build_verma(g, epsilon(L(2)), 3)));
    CHECK(irreducible_quotient(build_verma(g, epsilon(L(2)), 3))->total_dim() == 2);
    CHECK(irreducible_quotient(build_verma(g, epsilon(L(2), Rational(1, 3)), 3))->total_dim() == 4);
    CHECK_THROWS_AS(parabolic_verma(g, epsilon(L(4)), 2), InvalidParabolicWeight);

    auto gb = build_algebra(Series::Bar, XType::A, 0, 2, false);
    CHECK(parabolic_verma(gb, epsilon(L(1)) + epsilon(L(3)), 2)->total_dim() == 1);
    CHECK(parabolic_verma(gb, epsilon(L(1)), 2)->total_dim() == 2);
}

TEST_CASE("tensor products and singular vectors") {
    auto g = build_algebra(Series::Plain, XType::A, 0, 2, true);
    auto v = parabolic_verma(g, epsilon(L(2)), 2);
    TensorModule t({v, v}, v->depth);
    int total = 0;
    for (const auto& c : t.all_coords()) total += t.block(c).dim;
    CHECK(total == 4);
    const auto* mid = t.block_at(epsilon(L(2)) + epsilon(L(4)));
    REQUIRE(mid);
    CHECK(mid->dim == 2);
    MatQ s = t.singular_vectors(mid->coords);
    REQUIRE(s.cols() == 1);
    CHECK(s(0, 0) + s(1, 0) == 0);
    CHECK(s(0, 0) != 0);
    CHECK(t.singular_vectors(t.block_at(epsilon(L(2), 2))->coords).cols() == 1);
    CHECK(t.singular_vectors(t.block_at(epsilon(L(4), 2))->coords).cols() == 0);

    // odd ⊗ odd is even
    auto gs = build_algebra(Series::Tilde, XType::A, 0, 1, true);
    auto w = build_verma(gs, epsilon(L(1)) + epsilon(L(2), 3), 2);
    TensorModule ts({w, w}, 2);
    const auto* low = ts.block_at(w->hw * 2 - epsilon(L(1), 2) + epsilon(L(2), 2));
    REQUIRE(low);
    for (int p : low->parity) CHECK(p == (w->blocks[0].parity * 2 + 2) % 2);
}

TEST_CASE("singular vectors: filtered roots agree with all roots") {
    auto g = build_algebra(Series::Tilde, XType::A, 1, 2, false);
    auto v = build_verma(g, epsilon(L(-2), Rational(1, 2)) + epsilon(L(1), 2), 3);
    for (std::size_t b = 0; b < v->blocks.size(); ++b)
        CHECK(same_span(singular_vectors(*v, static_cast<int>(b)), singular_vectors(*v, static_cast<int>(b), true)));
}

TEST_CASE("truncation") {
    auto g3 = build_algebra(Series::Plain, XType::A, 0, 3, false);
    auto g2 = build_algebra(Series::Plain, XType::A, 0, 2, false);
    std::string why;
    CHECK_MESSAGE(same_module(*truncate(build_verma(g3, epsilon(L(2)), 2), g2), *build_verma(g2, epsilon(L(2)), 2), &why),
                  why);
    const Weight top = epsilon(L(2)) + epsilon(L(4)) + epsilon(L(6));
    CHECK(truncate(parabolic_verma(g3, top, 2), g2)->total_dim() == 0);

    // raising operators outside the rank-2 roots kill Ξ₂-weight vectors
    auto p = parabolic_verma(g3, epsilon(L(2), 2) + epsilon(L(4)), 3);
    for (std::size_t b = 0; b < p->blocks.size(); ++b) {
        if (!weight_in_Xi(p->blocks[b].weight, Series::Plain, XType::A, 0, 2) || p->blocks[b].dim == 0) continue;
        for (int r = 0; r < g3->num_roots(); ++r) {
            if (g3->roots[r].eps[2] == 0) continue;
            const auto& a = p->act(g3->raising_index(r), static_cast<int>(b));
            CHECK((a.target < 0 || is_zero(a.mat)));
        }
    }
}

TEST_CASE("functors T and T-bar on a tilde parabolic Verma module") {
    auto gt = build_algebra(Series::Tilde, XType::A, 0, 2, true);
    auto gp = build_algebra(Series::Plain, XType::A, 0, 2, true);
    auto gb = build_algebra(Series::Bar, XType::A, 0, 2, true);
    const DominantWeightSpec one{Partition({1}), 0, {}};
    const Weight wt = make_weight(one, Series::Tilde, XType::A, 0, 2);
    const Weight wp = make_weight(one, Series::Plain, XType::A, 0, 2);
    const Weight wb = make_weight(one, Series::Bar, XType::A, 0, 2);
    auto dt = parabolic_verma(gt, wt, 3);
    auto tp = functor_T(dt, gp, 1);
    auto tb = functor_T(dt, gb, 1);
    CHECK(tp->hw == wp);
    CHECK(tb->hw == wb);
    std::string why;
    CHECK_MESSAGE(certify_isomorphism(*parabolic_verma(gp, wp, 1), *tp, 1, &why), why);
    CHECK_MESSAGE(certify_isomorphism(*parabolic_verma(gb, wb, 1), *tb, 1, &why), why);
    CHECK(functor_T(parabolic_verma(gt, epsilon(L(1), 3), 1), gp, 1)->total_dim() == 0);

    auto tm = transfer_maps(*parabolic_verma(gt, wt, 1), wp, 1);
    REQUIRE(tm.y.size() == 1);
    CHECK(gt->basis[tm.y[0]].parity == 1);
    CHECK(tm.scale != 0);
    auto v1 = parabolic_verma(gt, wt, 1);
    Word xy = tm.x;
    xy.insert(xy.end(), tm.y.begin(), tm.y.end());
    auto [blk, img] = apply_word(*v1, xy, 0, eye(1));
    CHECK(blk == 0);
    CHECK(img(0, 0) == tm.scale);
    auto same = transfer_maps(*v1, wt, 1);
    CHECK(same.y.empty());
}

TEST_CASE("property: tensor weights are additive; tail coefficients vanish only jointly") {
    auto g = build_algebra(Series::Tilde, XType::A, 1, 2, true);
    const DominantWeightSpec a{Partition({2}), Rational(1, 2), {Rational(1, 3)}};
    const DominantWeightSpec b{Partition({1, 1}), 0, {Rational(-2)}};
    auto ma = parabolic_verma(g, make_weight(a, Series::Tilde, XType::A, 1, 2), 3);
    auto mb = parabolic_verma(g, make_weight(b, Series::Tilde, XType::A, 1, 2), 3);
    TensorModule t({ma, mb}, 3);
    for (const auto& c : t.all_coords()) {
        const auto& blk = t.block(c);
        for (const auto& combo : blk.combos)
            CHECK(ma->blocks[combo[0]].weight + mb->blocks[combo[1]].weight == blk.weight);
    }
    for (const auto& x : ma->blocks)
        for (const auto& y : mb->blocks) {
            if (x.dim == 0 || y.dim == 0) continue;
            for (const auto& l : g->cartan) {
                if (!l.is_tail()) continue;
                CHECK(x.weight[l] >= 0);
                CHECK(((x.weight + y.weight)[l] == 0) == (x.weight[l] == 0 && y.weight[l] == 0));
            }
        }
}
