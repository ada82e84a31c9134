#include "superkz/modules.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace superkz {

std::string to_string(ModuleKind k) {
    switch (k) {
        case ModuleKind::Verma: return "verma";
        case ModuleKind::ParabolicVerma: return "parabolic";
        case ModuleKind::Irreducible: return "irreducible";
        case ModuleKind::Restricted: return "restricted";
    }
    return "?";
}

int WeightModule::find_block(const std::vector<int>& coords) const {
    auto it = block_index_.find(coords);
    return it == block_index_.end() ? -1 : it->second;
}

int WeightModule::find_block(const Weight& w) const {
    auto c = coords_of(w);
    return c ? find_block(*c) : -1;
}

std::optional<std::vector<int>> WeightModule::coords_of(const Weight& w) const {
    Weight diff = hw - w;
    if (diff.level != 0) return std::nullopt;
    std::vector<Rational> e;
    try {
        e = weight_coords(diff, algebra->cartan);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return algebra->simple_coords(e);
}

int WeightModule::total_dim() const {
    int t = 0;
    for (const auto& b : blocks) t += b.dim;
    return t;
}

Rational WeightModule::cartan_value(int j, int block) const {
    return blocks[block].weight[algebra->cartan[j]];
}

std::vector<int> WeightModule::shift(int elem) const {
    const BasisElement& be = algebra->basis[elem];
    std::vector<int> s(algebra->rank(), 0);
    if (be.kind == ElementKind::Cartan) return s;
    const auto& c = algebra->roots[be.slot].coords;
    for (int i = 0; i < algebra->rank(); ++i) s[i] = be.kind == ElementKind::Lowering ? c[i] : -c[i];
    return s;
}

void WeightModule::index_blocks() {
    block_index_.clear();
    for (std::size_t b = 0; b < blocks.size(); ++b) block_index_[blocks[b].coords] = static_cast<int>(b);
}

Weight weight_at(const AlgebraInstance& g, const Weight& hw, const std::vector<int>& coords) {
    Weight w = hw;
    for (int s = 0; s < g.rank(); ++s) {
        if (coords[s] == 0) continue;
        auto e = g.simple_eps(s);
        for (int j = 0; j < g.cartan_dim(); ++j)
            if (e[j] != 0) w.set(g.cartan[j], w[g.cartan[j]] - Rational(coords[s] * e[j]));
    }
    return w;
}

int default_hw_parity(const Weight& hw, XType x) {
    try {
        return weight_parity(hw, x);
    } catch (const std::exception&) {
        return 0;
    }
}

namespace {

using Key = std::vector<int>;
using Combo = std::map<Key, Rational>;

void add_to(Combo& dst, const Combo& src, const Rational& c) {
    if (c == 0) return;
    for (const auto& [k, v] : src) {
        Rational& t = dst[k];
        t += c * v;
        if (t == 0) dst.erase(k);
    }
}

void add_key(Combo& dst, const Key& k, const Rational& c) {
    if (c == 0) return;
    Rational& t = dst[k];
    t += c;
    if (t == 0) dst.erase(k);
}

// Normal ordering of x·f_{k_1}⋯f_{k_r} v in the PBW basis of the Verma module.
class VermaEngine {
public:
    VermaEngine(const AlgebraInstance& g, const Weight& hw) : g_(g), level_(hw.level) {
        for (const auto& l : g.cartan) hwv_.push_back(hw[l]);
    }

    Combo act(int x, const Key& m) {
        const BasisElement& be = g_.basis[x];
        if (be.kind == ElementKind::Cartan) {
            Rational v = hwv_[be.slot];
            for (int r : m) v -= g_.roots[r].eps[be.slot];
            Combo out;
            add_key(out, m, v);
            return out;
        }
        if (be.kind == ElementKind::Raising && m.empty()) return {};
        auto mk = std::make_pair(x, m);
        auto it = memo_.find(mk);
        if (it != memo_.end()) return it->second;

        Combo out;
        if (be.kind == ElementKind::Lowering) {
            const int a = be.slot;
            if (m.empty() || a < m[0] || (a == m[0] && be.parity == 0)) {
                Key k;
                k.reserve(m.size() + 1);
                k.push_back(a);
                k.insert(k.end(), m.begin(), m.end());
                out[k] = 1;
                memo_.emplace(mk, out);
                return out;
            }
        }
        const int b = m[0];
        Key tail(m.begin() + 1, m.end());
        if (be.kind == ElementKind::Lowering && be.slot == b) {
            const Bracket& br = g_.bracket(x, x);
            for (const auto& [t, c] : br.terms) add_to(out, act(t, tail), c / 2);
            add_key(out, tail, br.k * level_ / 2);
            memo_.emplace(mk, out);
            return out;
        }
        const int fb = g_.lowering_index(b);
        const Rational sgn = (be.parity & g_.roots[b].parity) ? -1 : 1;
        Combo inner = act(x, tail);
        for (const auto& [k, c] : inner) add_to(out, act(fb, k), sgn * c);
        const Bracket& br = g_.bracket(x, fb);
        for (const auto& [t, c] : br.terms) add_to(out, act(t, tail), c);
        add_key(out, tail, br.k * level_);
        memo_.emplace(mk, out);
        return out;
    }

private:
    const AlgebraInstance& g_;
    Rational level_;
    std::vector<Rational> hwv_;
    std::map<std::pair<int, Key>, Combo> memo_;
};

void enumerate_keys(const AlgebraInstance& g, int start, int depth_left, Key& cur, std::vector<Key>& out) {
    out.push_back(cur);
    for (int r = start; r < g.num_roots(); ++r) {
        const int h = g.roots[r].height;
        if (h > depth_left) continue;
        if (g.roots[r].parity == 1 && !cur.empty() && cur.back() == r) continue;
        cur.push_back(r);
        enumerate_keys(g, g.roots[r].parity == 1 ? r + 1 : r, depth_left - h, cur, out);
        cur.pop_back();
    }
}

int block_parity(const AlgebraInstance& g, int hw_parity, const std::vector<int>& coords) {
    int p = hw_parity;
    for (int s = 0; s < g.rank(); ++s) p += coords[s] * g.simple_parity(s);
    return ((p % 2) + 2) % 2;
}

void sort_blocks(std::vector<Block>& blocks, std::vector<int>* perm) {
    std::vector<int> order(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (blocks[a].depth != blocks[b].depth) return blocks[a].depth < blocks[b].depth;
        return blocks[a].coords < blocks[b].coords;
    });
    std::vector<Block> sorted;
    for (int i : order) sorted.push_back(blocks[i]);
    blocks = std::move(sorted);
    if (perm) *perm = order;
}

int coord_depth(const std::vector<int>& c) {
    int d = 0;
    for (int v : c) d += v;
    return d;
}

}  // namespace

ModulePtr build_verma(AlgebraPtr g, const Weight& hw, int depth, std::optional<int> hw_parity) {
    weight_coords(hw, g->cartan);  // support check
    auto m = std::make_shared<WeightModule>();
    m->algebra = g;
    m->hw = hw;
    m->kind = ModuleKind::Verma;
    m->depth = depth;
    m->exact_to = depth;
    m->hw_parity = hw_parity ? *hw_parity : default_hw_parity(hw, g->x);

    std::vector<Key> all;
    Key cur;
    enumerate_keys(*g, 0, depth, cur, all);
    std::map<std::vector<int>, std::vector<Key>> grouped;
    for (const auto& k : all) {
        std::vector<int> c(g->rank(), 0);
        for (int r : k)
            for (int s = 0; s < g->rank(); ++s) c[s] += g->roots[r].coords[s];
        grouped[c].push_back(k);
    }
    for (auto& [c, ks] : grouped) {
        std::sort(ks.begin(), ks.end(), [&](const Key& a, const Key& b) {
            std::vector<int> ea(g->num_roots(), 0), eb(g->num_roots(), 0);
            for (int r : a) ++ea[r];
            for (int r : b) ++eb[r];
            return ea > eb;
        });
        Block b;
        b.coords = c;
        b.depth = coord_depth(c);
        b.weight = weight_at(*g, hw, c);
        b.dim = static_cast<int>(ks.size());
        b.parity = block_parity(*g, m->hw_parity, c);
        m->blocks.push_back(b);
    }
    std::vector<int> perm;
    sort_blocks(m->blocks, &perm);
    std::vector<std::vector<Key>> grouped_keys;
    for (auto& [c, ks] : grouped) grouped_keys.push_back(ks);
    for (int i : perm) m->keys.push_back(grouped_keys[i]);
    m->index_blocks();

    std::vector<std::map<Key, int>> key_pos(m->blocks.size());
    for (std::size_t b = 0; b < m->blocks.size(); ++b)
        for (std::size_t i = 0; i < m->keys[b].size(); ++i) key_pos[b][m->keys[b][i]] = static_cast<int>(i);

    VermaEngine eng(*g, hw);
    m->actions.assign(g->dim(), std::vector<BlockAction>(m->blocks.size()));
    for (int x = 0; x < g->dim(); ++x) {
        std::vector<int> sh = m->shift(x);
        for (std::size_t b = 0; b < m->blocks.size(); ++b) {
            BlockAction& ba = m->actions[x][b];
            std::vector<int> tc = m->blocks[b].coords;
            bool negative = false;
            for (int s = 0; s < g->rank(); ++s) {
                tc[s] += sh[s];
                if (tc[s] < 0) negative = true;
            }
            if (negative) continue;
            if (coord_depth(tc) > depth) {
                ba.lost = true;
                continue;
            }
            const int t = m->find_block(tc);
            if (t < 0) continue;
            std::vector<TripletQ> trip;
            for (std::size_t i = 0; i < m->keys[b].size(); ++i) {
                Combo c = eng.act(x, m->keys[b][i]);
                for (const auto& [k, v] : c) {
                    auto it = key_pos[t].find(k);
                    if (it == key_pos[t].end()) throw std::logic_error("build_verma: monomial outside target block");
                    trip.emplace_back(it->second, static_cast<int>(i), v);
                }
            }
            if (trip.empty()) continue;
            ba.target = t;
            ba.mat.resize(m->blocks[t].dim, m->blocks[b].dim);
            ba.mat.setFromTriplets(trip.begin(), trip.end());
        }
    }
    return m;
}

ModulePtr quotient(ModulePtr m, const std::vector<MatQ>& sub, ModuleKind kind) {
    auto q = std::make_shared<WeightModule>();
    q->algebra = m->algebra;
    q->hw = m->hw;
    q->kind = kind;
    q->depth = m->depth;
    q->exact_to = m->exact_to;
    q->hw_parity = m->hw_parity;
    q->parent = m;

    std::vector<Reduction> red;
    std::vector<int> new_index(m->blocks.size(), -1);
    for (std::size_t b = 0; b < m->blocks.size(); ++b) {
        red.push_back(reduction(sub[b], m->blocks[b].dim));
        if (red.back().keep.empty()) continue;
        Block nb = m->blocks[b];
        nb.dim = static_cast<int>(red.back().keep.size());
        new_index[b] = static_cast<int>(q->blocks.size());
        q->blocks.push_back(nb);
        q->parent_block.push_back(static_cast<int>(b));
        q->parent_include.push_back(red.back().include);
    }
    q->parent_sub = sub;
    q->index_blocks();

    const int nd = m->algebra->dim();
    q->actions.assign(nd, std::vector<BlockAction>(q->blocks.size()));
    for (int x = 0; x < nd; ++x) {
        for (std::size_t nb = 0; nb < q->blocks.size(); ++nb) {
            const int b = q->parent_block[nb];
            const BlockAction& a = m->act(x, b);
            BlockAction& out = q->actions[x][nb];
            if (a.lost) {
                out.lost = true;
                continue;
            }
            if (a.target < 0 || new_index[a.target] < 0) continue;
            MatQ mat = red[a.target].project * to_dense(a.mat) * red[b].include;
            if (mat.isZero()) continue;
            out.target = new_index[a.target];
            out.mat = to_sparse(mat);
        }
    }
    return q;
}

namespace {

int hw_block(const WeightModule& m) {
    for (std::size_t b = 0; b < m.blocks.size(); ++b)
        if (m.blocks[b].depth == 0) return static_cast<int>(b);
    return -1;
}

}  // namespace

std::vector<MatQ> radical(const WeightModule& m) {
    const AlgebraInstance& g = *m.algebra;
    std::vector<MatQ> rad(m.blocks.size());
    std::vector<std::optional<Reduction>> red(m.blocks.size());
    auto get_red = [&](int t) -> const Reduction& {
        if (!red[t]) red[t] = reduction(rad[t], m.blocks[t].dim);
        return *red[t];
    };
    for (std::size_t b = 0; b < m.blocks.size(); ++b) {
        const int dim = m.blocks[b].dim;
        if (m.blocks[b].depth == 0) {
            rad[b] = MatQ::Zero(dim, 0);
            continue;
        }
        MatQ stack(0, dim);
        for (int r = 0; r < g.num_roots(); ++r) {
            const BlockAction& a = m.act(g.roots[r].raising, static_cast<int>(b));
            if (a.target < 0) continue;
            const Reduction& rt = get_red(a.target);
            if (rt.keep.empty()) continue;
            stack = vstack(stack, rt.project * to_dense(a.mat));
        }
        rad[b] = nullspace(stack);
    }
    return rad;
}

std::vector<MatQ> contravariant_form(const WeightModule& verma) {
    if (verma.keys.empty()) throw std::invalid_argument("contravariant_form: Verma module required");
    const AlgebraInstance& g = *verma.algebra;
    const int h = hw_block(verma);
    std::vector<MatQ> out(verma.blocks.size());
    for (std::size_t b = 0; b < verma.blocks.size(); ++b) {
        const int dim = verma.blocks[b].dim;
        MatQ s(dim, dim);
        for (int i = 0; i < dim; ++i) {
            const auto& key = verma.keys[b][i];
            MatQ cur = MatQ::Identity(dim, dim);
            int blk = static_cast<int>(b);
            bool zero = false;
            for (int r : key) {
                const BlockAction& a = verma.act(g.roots[r].raising, blk);
                if (a.target < 0) {
                    zero = true;
                    break;
                }
                cur = to_dense(a.mat) * cur;
                blk = a.target;
            }
            if (zero || blk != h) {
                s.row(i).setZero();
                continue;
            }
            s.row(i) = cur.row(0);
        }
        out[b] = s;
    }
    return out;
}

std::vector<int> default_levi(const AlgebraInstance& g) {
    std::vector<int> out;
    for (int s = 0; s < g.rank(); ++s)
        if (g.simple_is_levi(s)) out.push_back(s);
    return out;
}

namespace {

bool supported_on(const std::vector<int>& coords, const std::vector<char>& allowed) {
    for (std::size_t s = 0; s < coords.size(); ++s)
        if (coords[s] != 0 && !allowed[s]) return false;
    return true;
}

}  // namespace

std::vector<MatQ> levi_submodule(const WeightModule& verma, const std::vector<int>& levi) {
    if (verma.keys.empty()) throw std::invalid_argument("levi_submodule: Verma module required");
    const AlgebraInstance& g = *verma.algebra;
    std::vector<char> allowed(g.rank(), 0);
    for (int s : levi) allowed.at(s) = 1;
    std::vector<char> levi_root(g.num_roots(), 0);
    for (int r = 0; r < g.num_roots(); ++r) levi_root[r] = supported_on(g.roots[r].coords, allowed);

    const std::size_t nb = verma.blocks.size();
    std::vector<MatQ> lrad(nb), closure(nb);
    std::vector<MatQ> incoming(nb);
    for (std::size_t b = 0; b < nb; ++b) incoming[b] = MatQ::Zero(verma.blocks[b].dim, 0);

    for (std::size_t b = 0; b < nb; ++b) {
        const int dim = verma.blocks[b].dim;
        // Levi-only monomials
        std::vector<int> idx;
        for (int i = 0; i < dim; ++i) {
            bool ok = true;
            for (int r : verma.keys[b][i]) ok = ok && levi_root[r];
            if (ok) idx.push_back(i);
        }
        MatQ L = MatQ::Zero(dim, static_cast<int>(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c) L(idx[c], static_cast<int>(c)) = 1;
        if (idx.empty() || verma.blocks[b].depth == 0) {
            lrad[b] = MatQ::Zero(dim, 0);
        } else {
            MatQ stack(0, static_cast<int>(idx.size()));
            for (int r = 0; r < g.num_roots(); ++r) {
                if (!levi_root[r]) continue;
                const BlockAction& a = verma.act(g.roots[r].raising, static_cast<int>(b));
                if (a.target < 0) continue;
                Reduction rt = reduction(lrad[a.target], verma.blocks[a.target].dim);
                if (rt.keep.empty()) continue;
                stack = vstack(stack, rt.project * to_dense(a.mat) * L);
            }
            lrad[b] = L * nullspace(stack);
        }
        closure[b] = column_basis(hstack(lrad[b], incoming[b]));
        if (closure[b].cols() == 0) continue;
        for (int r = 0; r < g.num_roots(); ++r) {
            const BlockAction& a = verma.act(g.roots[r].lowering, static_cast<int>(b));
            if (a.target < 0 || a.lost) continue;
            incoming[a.target] = hstack(incoming[a.target], to_dense(a.mat) * closure[b]);
        }
    }
    return closure;
}

ModulePtr parabolic_verma(AlgebraPtr g, const Weight& hw, int depth, std::optional<std::vector<int>> levi,
                          std::optional<int> hw_parity) {
    std::vector<int> y = levi ? *levi : default_levi(*g);
    // even Levi simple roots need a dominant integral value
    for (int s : y) {
        if (g->simple_parity(s) != 0) continue;
        const RootDatum& rd = g->roots[g->simple[s]];
        const Bracket& br = g->bracket(rd.raising, rd.lowering);
        Rational lam = 0, alpha = 0;
        for (const auto& [t, c] : br.terms) {
            const BasisElement& be = g->basis[t];
            if (be.kind != ElementKind::Cartan) continue;
            lam += c * hw[g->cartan[be.slot]];
            alpha += c * Rational(rd.eps[be.slot]);
        }
        lam += br.k * hw.level;
        if (alpha == 0) continue;
        Rational v = 2 * lam / alpha;
        if (!is_integer(v) || v < 0)
            throw InvalidParabolicWeight("highest weight is not dominant integral for the Levi subalgebra");
    }
    auto v = build_verma(g, hw, depth, hw_parity);
    auto sub = levi_submodule(*v, y);
    return quotient(v, sub, ModuleKind::ParabolicVerma);
}

ModulePtr irreducible_quotient(ModulePtr m) {
    return quotient(m, radical(*m), ModuleKind::Irreducible);
}

MatQ singular_vectors(const WeightModule& m, int block, bool all_roots) {
    const AlgebraInstance& g = *m.algebra;
    const int dim = m.blocks[block].dim;
    if (!all_roots) {
        MatQ stack(0, dim);
        for (int r = 0; r < g.num_roots(); ++r) {
            const BlockAction& a = m.act(g.roots[r].raising, block);
            if (a.target < 0) continue;
            stack = vstack(stack, to_dense(a.mat));
        }
        return nullspace(stack);
    }
    // intersection of the individual kernels
    MatQ cur = MatQ::Identity(dim, dim);
    for (int r = 0; r < g.num_roots(); ++r) {
        const BlockAction& a = m.act(g.roots[r].raising, block);
        if (a.target < 0 || cur.cols() == 0) continue;
        MatQ k = nullspace(to_dense(a.mat) * cur);
        cur = cur * k;
    }
    return column_basis(cur);
}

ModulePtr restrict_module(ModulePtr m, AlgebraPtr sub, const Weight& hw_sub,
                          const std::function<bool(const Weight&)>& keep, std::optional<int> depth_cap) {
    auto r = std::make_shared<WeightModule>();
    r->algebra = sub;
    r->hw = hw_sub;
    r->kind = ModuleKind::Restricted;
    r->parent = m;
    Embedding emb = embed(*sub, *m->algebra);

    std::vector<Block> blocks;
    std::vector<int> origin;
    for (std::size_t b = 0; b < m->blocks.size(); ++b) {
        const Block& ob = m->blocks[b];
        if (!keep(ob.weight)) continue;
        Weight diff = hw_sub - ob.weight;
        auto c = sub->simple_coords(weight_coords(diff, sub->cartan));
        if (!c) throw std::logic_error("restrict_module: weight outside the root lattice of the subalgebra");
        for (int v : *c)
            if (v < 0) throw std::logic_error("restrict_module: weight above the new highest weight");
        Block nb = ob;
        nb.coords = *c;
        nb.depth = coord_depth(*c);
        if (depth_cap && nb.depth > *depth_cap) continue;
        blocks.push_back(nb);
        origin.push_back(static_cast<int>(b));
    }
    std::vector<int> perm;
    sort_blocks(blocks, &perm);
    r->blocks = blocks;
    std::vector<int> new_index(m->blocks.size(), -1);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        r->parent_block.push_back(origin[perm[i]]);
        new_index[origin[perm[i]]] = static_cast<int>(i);
        r->parent_include.push_back(MatQ::Identity(blocks[i].dim, blocks[i].dim));
    }
    r->index_blocks();
    int dmax = 0;
    for (const auto& b : r->blocks) dmax = std::max(dmax, b.depth);
    r->depth = depth_cap ? *depth_cap : dmax;
    r->exact_to = r->depth;
    const int h = r->find_block(std::vector<int>(sub->rank(), 0));
    r->hw_parity = h >= 0 ? r->blocks[h].parity : default_hw_parity(hw_sub, sub->x);

    r->actions.assign(sub->dim(), std::vector<BlockAction>(r->blocks.size()));
    for (int x = 0; x < sub->dim(); ++x) {
        const int bx = emb.target[x];
        for (std::size_t nb = 0; nb < r->blocks.size(); ++nb) {
            const BlockAction& a = m->act(bx, r->parent_block[nb]);
            BlockAction& out = r->actions[x][nb];
            if (a.lost) {
                out.lost = true;
                continue;
            }
            if (a.target < 0) continue;
            const int t = new_index[a.target];
            if (t < 0) {
                const Block& tb = m->blocks[a.target];
                Weight diff = hw_sub - tb.weight;
                bool beyond = false;
                if (depth_cap && keep(tb.weight)) {
                    auto c = sub->simple_coords(weight_coords(diff, sub->cartan));
                    beyond = c && coord_depth(*c) > *depth_cap;
                }
                if (beyond) {
                    out.lost = true;
                    continue;
                }
                if (!is_zero(a.mat)) throw std::logic_error("restrict_module: kept weights are not closed under the subalgebra");
                continue;
            }
            out.target = t;
            out.mat = a.mat * emb.scale[x];
        }
    }
    return r;
}

ModulePtr truncate(ModulePtr m, AlgebraPtr sub_k) {
    // Support inside the rank-k labels. On modules of the category this is membership in Ξ_k;
    // it also keeps Verma modules, whose weights can have negative tail coefficients, closed.
    auto keep = [&](const Weight& w) {
        for (const auto& [l, v] : w.eps)
            if (sub_k->cartan_pos(l) < 0) return false;
        return true;
    };
    if (!keep(m->hw)) {
        auto r = std::make_shared<WeightModule>();
        r->algebra = sub_k;
        r->hw = m->hw;
        r->kind = ModuleKind::Restricted;
        r->parent = m;
        r->depth = m->depth;
        r->exact_to = m->exact_to;
        r->actions.assign(sub_k->dim(), {});
        return r;
    }
    return restrict_module(m, sub_k, m->hw, keep);
}

ModulePtr functor_T(ModulePtr m, AlgebraPtr target, std::optional<int> depth_cap) {
    auto keep = [&](const Weight& w) { return weight_in_Xi(w, target->series, target->x, target->m, target->n); };
    int best = -1;
    for (std::size_t b = 0; b < m->blocks.size(); ++b) {
        if (!keep(m->blocks[b].weight)) continue;
        if (best < 0 || m->blocks[b].depth < m->blocks[best].depth) best = static_cast<int>(b);
    }
    if (best < 0) {
        auto r = std::make_shared<WeightModule>();
        r->algebra = target;
        r->kind = ModuleKind::Restricted;
        r->parent = m;
        r->actions.assign(target->dim(), {});
        return r;
    }
    return restrict_module(m, target, m->blocks[best].weight, keep, depth_cap);
}

bool same_module(const WeightModule& a, const WeightModule& b, std::string* why) {
    auto fail = [&](const std::string& s) {
        if (why) *why = s;
        return false;
    };
    if (a.algebra->describe() != b.algebra->describe()) return fail("different algebras");
    if (a.blocks.size() != b.blocks.size()) return fail("block counts differ");
    std::vector<int> map(a.blocks.size(), -1);
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        const int j = b.find_block(a.blocks[i].weight);
        if (j < 0) return fail("weight " + a.blocks[i].weight.str() + " missing");
        if (a.blocks[i].dim != b.blocks[j].dim) return fail("dimension differs at " + a.blocks[i].weight.str());
        if (a.blocks[i].parity != b.blocks[j].parity) return fail("parity differs at " + a.blocks[i].weight.str());
        map[i] = j;
    }
    for (int x = 0; x < a.algebra->dim(); ++x) {
        for (std::size_t i = 0; i < a.blocks.size(); ++i) {
            const BlockAction& pa = a.act(x, static_cast<int>(i));
            const BlockAction& pb = b.act(x, map[i]);
            if (pa.lost || pb.lost) continue;
            const bool za = pa.target < 0, zb = pb.target < 0;
            if (za && zb) continue;
            if (za != zb) {
                const SpQ& nz = za ? pb.mat : pa.mat;
                if (!is_zero(nz)) return fail("action of " + a.algebra->basis[x].name + " differs");
                continue;
            }
            if (map[pa.target] != pb.target) return fail("targets differ");
            if (!equal(pa.mat, pb.mat)) return fail("matrix of " + a.algebra->basis[x].name + " differs");
        }
    }
    return true;
}

std::vector<MatQ> verma_kernel(const WeightModule& q, ModulePtr* verma) {
    if (!q.keys.empty()) {
        std::vector<MatQ> k;
        for (const auto& b : q.blocks) k.push_back(MatQ::Zero(b.dim, 0));
        return k;
    }
    if (!q.parent || q.kind == ModuleKind::Restricted) throw std::invalid_argument("verma_kernel: not a quotient");
    const WeightModule& p = *q.parent;
    ModulePtr root = q.parent;
    std::vector<MatQ> out = verma_kernel(p, p.keys.empty() ? &root : nullptr);
    if (verma) *verma = root;
    for (std::size_t pb = 0; pb < p.blocks.size(); ++pb) {
        // parent block as columns in the root's coordinates
        MatQ inc = q.parent_sub[pb];
        int blk = static_cast<int>(pb);
        const WeightModule* cur = &p;
        while (cur->keys.empty()) {
            inc = cur->parent_include[blk] * inc;
            blk = cur->parent_block[blk];
            cur = cur->parent.get();
        }
        out[blk] = column_basis(hstack(out[blk], inc));
    }
    return out;
}

bool certify_isomorphism(const WeightModule& a, const WeightModule& b, int max_depth, std::string* why) {
    auto fail = [&](const std::string& s) {
        if (why) *why = s;
        return false;
    };
    if (a.algebra->describe() != b.algebra->describe()) return fail("different algebras");
    ModulePtr vroot;
    std::vector<MatQ> kern;
    const WeightModule* v = &a;
    if (a.keys.empty()) {
        kern = verma_kernel(a, &vroot);
        v = vroot.get();
    } else {
        for (const auto& blk : a.blocks) kern.push_back(MatQ::Zero(blk.dim, 0));
    }
    const AlgebraInstance& g = *a.algebra;
    const int ub = b.find_block(a.hw);
    if (ub < 0 || b.blocks[ub].dim != 1) return fail("no one-dimensional block at the highest weight");
    for (int r = 0; r < g.num_roots(); ++r) {
        const BlockAction& ra = b.act(g.roots[r].raising, ub);
        if (ra.target >= 0 && !is_zero(ra.mat)) return fail("highest weight vector is not singular");
    }
    if (b.blocks[ub].parity != v->blocks[0].parity) return fail("parity of the highest weight vector differs");

    // images of PBW monomials
    std::vector<MatQ> phi(v->blocks.size());
    std::vector<int> tgt(v->blocks.size(), -1);
    for (std::size_t vb = 0; vb < v->blocks.size(); ++vb) {
        if (v->blocks[vb].depth > max_depth) continue;
        const int bb = b.find_block(v->blocks[vb].weight);
        tgt[vb] = bb;
        const int bd = bb < 0 ? 0 : b.blocks[bb].dim;
        MatQ p = MatQ::Zero(bd, v->blocks[vb].dim);
        for (int i = 0; i < v->blocks[vb].dim; ++i) {
            const auto& key = v->keys[vb][i];
            VecQ cur = VecQ::Ones(1);
            int blk = ub;
            for (auto it = key.rbegin(); it != key.rend() && blk >= 0; ++it) {
                const BlockAction& la = b.act(g.roots[*it].lowering, blk);
                if (la.lost) return fail("target module too shallow");
                if (la.target < 0) {
                    blk = -1;
                    break;
                }
                cur = to_dense(la.mat) * cur;
                blk = la.target;
            }
            if (blk < 0) continue;
            if (blk != bb) return fail("weight bookkeeping mismatch");
            p.col(i) = cur;
        }
        phi[vb] = p;
        if (bb >= 0 && rank(p) != bd) return fail("not onto at " + v->blocks[vb].weight.str());
        MatQ ker = bd == 0 ? MatQ::Identity(v->blocks[vb].dim, v->blocks[vb].dim) : nullspace(p);
        if (!same_span(ker, kern[vb])) return fail("kernel differs at " + v->blocks[vb].weight.str());
    }
    for (std::size_t bb = 0; bb < b.blocks.size(); ++bb) {
        if (b.blocks[bb].depth > max_depth) continue;
        if (v->find_block(b.blocks[bb].weight) < 0) return fail("extra weight " + b.blocks[bb].weight.str());
    }
    // intertwining
    for (int x = 0; x < g.dim(); ++x) {
        for (std::size_t vb = 0; vb < v->blocks.size(); ++vb) {
            if (v->blocks[vb].depth > max_depth || tgt[vb] < 0) continue;
            const BlockAction& av = v->act(x, static_cast<int>(vb));
            const BlockAction& ab = b.act(x, tgt[vb]);
            if (av.lost || ab.lost) continue;
            const int vt = av.target;
            if (vt >= 0 && v->blocks[vt].depth > max_depth) continue;
            MatQ lhs, rhs;
            if (vt >= 0 && tgt[vt] >= 0) lhs = phi[vt] * to_dense(av.mat);
            if (ab.target >= 0) rhs = to_dense(ab.mat) * phi[vb];
            const bool lz = lhs.size() == 0 || lhs.isZero(), rz = rhs.size() == 0 || rhs.isZero();
            if (lz && rz) continue;
            if (lz != rz || lhs != rhs) return fail("map does not intertwine " + g.basis[x].name);
        }
    }
    return true;
}

std::string summary_csv(const WeightModule& m) {
    std::ostringstream os;
    os << "depth,coords,weight,dim,parity\n";
    for (const auto& b : m.blocks) {
        os << b.depth << ",\"";
        for (std::size_t i = 0; i < b.coords.size(); ++i) os << (i ? " " : "") << b.coords[i];
        os << "\",\"" << b.weight.str() << "\"," << b.dim << "," << b.parity << "\n";
    }
    return os.str();
}

namespace {

void words_rec(const AlgebraInstance& g, const std::vector<int>& roots, std::size_t start, std::vector<int>& rem,
               int deg_left, Word& cur, bool lowering, std::vector<Word>& out) {
    bool done = true;
    for (int v : rem) done = done && v == 0;
    if (done) {
        out.push_back(cur);
        return;
    }
    if (deg_left == 0) return;
    for (std::size_t i = start; i < roots.size(); ++i) {
        const RootDatum& rd = g.roots[roots[i]];
        bool fits = true;
        for (std::size_t s = 0; s < rem.size(); ++s) fits = fits && rd.coords[s] <= rem[s];
        if (!fits) continue;
        for (std::size_t s = 0; s < rem.size(); ++s) rem[s] -= rd.coords[s];
        cur.push_back(lowering ? rd.lowering : rd.raising);
        words_rec(g, roots, rd.parity == 1 ? i + 1 : i, rem, deg_left - 1, cur, lowering, out);
        cur.pop_back();
        for (std::size_t s = 0; s < rem.size(); ++s) rem[s] += rd.coords[s];
    }
}

}  // namespace

std::vector<Word> pbw_words(const AlgebraInstance& g, const std::vector<int>& roots, bool lowering,
                            const std::vector<int>& coords, int max_degree) {
    std::vector<int> sorted = roots;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> rem = coords;
    Word cur;
    std::vector<Word> out;
    words_rec(g, sorted, 0, rem, max_degree, cur, lowering, out);
    return out;
}

}  // namespace superkz
