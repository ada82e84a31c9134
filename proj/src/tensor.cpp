#include "superkz/tensor.hpp"

#include <set>
#include <stdexcept>

namespace superkz {

namespace {

int depth_of(const std::vector<int>& c) {
    int d = 0;
    for (int v : c) d += v;
    return d;
}

}  // namespace

TensorModule::TensorModule(std::vector<ModulePtr> fs, int d) : factors(std::move(fs)), depth(d) {
    if (factors.empty()) throw std::invalid_argument("TensorModule: no factors");
    algebra = factors[0]->algebra;
    hw = factors[0]->hw;
    for (std::size_t i = 1; i < factors.size(); ++i) {
        if (factors[i]->algebra->describe() != algebra->describe())
            throw std::invalid_argument("TensorModule: factors over different algebras");
        hw = hw + factors[i]->hw;
    }
    for (const auto& f : factors)
        if (f->depth < depth) throw std::invalid_argument("TensorModule: factor truncated below the tensor depth");
}

std::vector<int> TensorModule::shift(int x) const {
    if (x == kCentralK) return std::vector<int>(algebra->rank(), 0);
    return factors[0]->shift(x);
}

std::optional<std::vector<int>> TensorModule::coords_of(const Weight& w) const {
    Weight diff = hw - w;
    if (diff.level != 0) return std::nullopt;
    try {
        return algebra->simple_coords(weight_coords(diff, algebra->cartan));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void TensorModule::combos_rec(int site, std::vector<int>& rem, std::vector<int>& cur,
                              std::vector<std::vector<int>>& out) const {
    if (site == sites()) {
        for (int v : rem)
            if (v != 0) return;
        out.push_back(cur);
        return;
    }
    const WeightModule& f = *factors[site];
    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
        const auto& c = f.blocks[b].coords;
        bool fits = true;
        for (std::size_t s = 0; s < rem.size(); ++s) fits = fits && c[s] <= rem[s];
        if (!fits) continue;
        for (std::size_t s = 0; s < rem.size(); ++s) rem[s] -= c[s];
        cur.push_back(static_cast<int>(b));
        combos_rec(site + 1, rem, cur, out);
        cur.pop_back();
        for (std::size_t s = 0; s < rem.size(); ++s) rem[s] += c[s];
    }
}

const TensorBlock& TensorModule::block(const std::vector<int>& coords) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    auto it = blocks_.find(coords);
    if (it != blocks_.end()) return it->second;
    TensorBlock tb;
    tb.coords = coords;
    tb.depth = depth_of(coords);
    tb.weight = weight_at(*algebra, hw, coords);
    if (tb.depth <= depth) {
        std::vector<int> rem = coords, cur;
        combos_rec(0, rem, cur, tb.combos);
    }
    for (std::size_t ci = 0; ci < tb.combos.size(); ++ci) {
        const auto& combo = tb.combos[ci];
        tb.combo_index[combo] = static_cast<int>(ci);
        tb.offsets.push_back(tb.dim);
        int size = 1, par = 0;
        for (int s = 0; s < sites(); ++s) {
            size *= factors[s]->blocks[combo[s]].dim;
            par += factors[s]->blocks[combo[s]].parity;
        }
        for (int k = 0; k < size; ++k) tb.parity.push_back(par % 2);
        tb.dim += size;
    }
    return blocks_.emplace(coords, std::move(tb)).first->second;
}

const TensorBlock* TensorModule::block_at(const Weight& w) const {
    auto c = coords_of(w);
    if (!c) return nullptr;
    for (int v : *c)
        if (v < 0) return nullptr;
    if (depth_of(*c) > depth) return nullptr;
    return &block(*c);
}

std::vector<std::vector<int>> TensorModule::all_coords() const {
    std::set<std::vector<int>> acc{std::vector<int>(algebra->rank(), 0)};
    for (const auto& f : factors) {
        std::set<std::vector<int>> next;
        for (const auto& a : acc)
            for (const auto& b : f->blocks) {
                std::vector<int> c = a;
                for (std::size_t s = 0; s < c.size(); ++s) c[s] += b.coords[s];
                if (depth_of(c) <= depth) next.insert(c);
            }
        acc = std::move(next);
    }
    std::vector<std::vector<int>> out(acc.begin(), acc.end());
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return depth_of(a) < depth_of(b); });
    return out;
}

const TensorAction& TensorModule::site_action(int site, int x, const std::vector<int>& coords) const {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    auto key = std::make_tuple(site, x, coords);
    auto it = actions_.find(key);
    if (it != actions_.end()) return it->second;

    TensorAction ta;
    const TensorBlock& src = block(coords);
    std::vector<int> tc = coords;
    const std::vector<int> sh = shift(x);
    bool negative = false;
    for (std::size_t s = 0; s < tc.size(); ++s) {
        tc[s] += sh[s];
        negative = negative || tc[s] < 0;
    }
    ta.target = tc;
    if (negative || src.dim == 0) {
        ta.zero = true;
    } else if (depth_of(tc) > depth) {
        ta.lost = true;
    } else {
        const TensorBlock& tgt = block(tc);
        std::vector<TripletQ> trip;
        const int xpar = x == kCentralK ? 0 : algebra->basis[x].parity;
        for (std::size_t ci = 0; ci < src.combos.size(); ++ci) {
            const auto& combo = src.combos[ci];
            int before = 1, after = 1, lpar = 0;
            for (int s = 0; s < site; ++s) {
                before *= factors[s]->blocks[combo[s]].dim;
                lpar += factors[s]->blocks[combo[s]].parity;
            }
            for (int s = site + 1; s < sites(); ++s) after *= factors[s]->blocks[combo[s]].dim;
            const Rational sign = (xpar && lpar % 2) ? -1 : 1;
            const int sdim = factors[site]->blocks[combo[site]].dim;
            if (x == kCentralK) {
                const Rational lv = factors[site]->level();
                if (lv == 0) continue;
                for (int k = 0; k < before * sdim * after; ++k)
                    trip.emplace_back(src.offsets[ci] + k, src.offsets[ci] + k, lv);
                continue;
            }
            const BlockAction& a = factors[site]->act(x, combo[site]);
            if (a.lost) throw std::runtime_error("TensorModule: factor truncated too shallow");
            if (a.target < 0) continue;
            std::vector<int> nc = combo;
            nc[site] = a.target;
            auto f = tgt.combo_index.find(nc);
            if (f == tgt.combo_index.end()) throw std::logic_error("TensorModule: target combination missing");
            const int toff = tgt.offsets[f->second];
            const int tdim = factors[site]->blocks[a.target].dim;
            for (int k = 0; k < a.mat.outerSize(); ++k)
                for (SpQ::InnerIterator e(a.mat, k); e; ++e) {
                    const Rational v = sign * e.value();
                    for (int l = 0; l < before; ++l)
                        for (int r = 0; r < after; ++r)
                            trip.emplace_back(toff + (l * tdim + static_cast<int>(e.row())) * after + r,
                                              src.offsets[ci] + (l * sdim + static_cast<int>(e.col())) * after + r, v);
                }
        }
        ta.mat.resize(tgt.dim, src.dim);
        ta.mat.setFromTriplets(trip.begin(), trip.end());
        ta.zero = ta.mat.nonZeros() == 0;
    }
    return actions_.emplace(key, std::move(ta)).first->second;
}

TensorAction TensorModule::delta_action(int x, const std::vector<int>& coords) const {
    TensorAction out;
    out.zero = true;
    for (int i = 0; i < sites(); ++i) {
        const TensorAction& a = site_action(i, x, coords);
        out.target = a.target;
        if (a.lost) {
            out.lost = true;
            out.zero = false;
            return out;
        }
        if (a.zero) continue;
        if (out.zero) {
            out.mat = a.mat;
            out.zero = false;
        } else {
            out.mat += a.mat;
        }
    }
    if (!out.zero && out.mat.nonZeros() == 0) out.zero = true;
    return out;
}

MatQ TensorModule::product(int i, int x, int j, int y, const std::vector<int>& coords) const {
    const int dim = block(coords).dim;
    auto is_lowering = [&](int e) { return e != kCentralK && algebra->basis[e].kind == ElementKind::Lowering; };
    Rational sign = 1;
    int fi = j, fx = y, si = i, sx = x;  // first (site, elem), then second
    if (i != j && is_lowering(y) && !is_lowering(x)) {
        fi = i, fx = x, si = j, sx = y;
        const int px = x == kCentralK ? 0 : algebra->basis[x].parity;
        if (px && algebra->basis[y].parity) sign = -1;
    }
    const TensorAction& a1 = site_action(fi, fx, coords);
    if (a1.lost) throw std::runtime_error("TensorModule: intermediate vector beyond truncation");
    if (a1.zero) return MatQ::Zero(dim, dim);
    const TensorAction& a2 = site_action(si, sx, a1.target);
    if (a2.lost) throw std::runtime_error("TensorModule: intermediate vector beyond truncation");
    if (a2.zero) return MatQ::Zero(dim, dim);
    if (a2.target != coords) throw std::invalid_argument("TensorModule::product: operator changes the weight");
    MatQ out = to_dense(a2.mat) * to_dense(a1.mat);
    if (sign != 1) out *= sign;
    return out;
}

MatQ TensorModule::site_cartan(int site, const std::vector<Rational>& c, const Rational& ck,
                               const std::vector<int>& coords) const {
    const TensorBlock& tb = block(coords);
    MatQ out = MatQ::Zero(tb.dim, tb.dim);
    for (std::size_t ci = 0; ci < tb.combos.size(); ++ci) {
        const Block& fb = factors[site]->blocks[tb.combos[ci][site]];
        Rational v = ck * factors[site]->level();
        for (int j = 0; j < algebra->cartan_dim(); ++j)
            if (c[j] != 0) v += c[j] * fb.weight[algebra->cartan[j]];
        const int end = ci + 1 < tb.combos.size() ? tb.offsets[ci + 1] : tb.dim;
        for (int k = tb.offsets[ci]; k < end; ++k) out(k, k) = v;
    }
    return out;
}

std::pair<std::vector<int>, MatQ> TensorModule::apply_word(const Word& w, const std::vector<int>& coords,
                                                           const MatQ& v) const {
    std::vector<int> cur = coords;
    MatQ vec = v;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        TensorAction a = delta_action(*it, cur);
        if (a.lost) throw std::runtime_error("TensorModule::apply_word: beyond truncation");
        cur = a.target;
        bool negative = false;
        for (int s : cur) negative = negative || s < 0;
        const int tdim = negative || depth_of(cur) > depth ? 0 : block(cur).dim;
        if (a.zero) {
            vec = MatQ::Zero(tdim, v.cols());
            continue;
        }
        vec = to_dense(a.mat) * vec;
    }
    return {cur, vec};
}

MatQ TensorModule::singular_vectors(const std::vector<int>& coords) const {
    const int dim = block(coords).dim;
    MatQ stack(0, dim);
    for (int r = 0; r < algebra->num_roots(); ++r) {
        TensorAction a = delta_action(algebra->roots[r].raising, coords);
        if (a.zero) continue;
        stack = vstack(stack, to_dense(a.mat));
    }
    return nullspace(stack);
}

std::pair<int, MatQ> apply_word(const WeightModule& m, const Word& w, int block, const MatQ& v) {
    int cur = block;
    MatQ vec = v;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        if (cur < 0) break;
        const BlockAction& a = m.act(*it, cur);
        if (a.lost) throw std::runtime_error("apply_word: beyond truncation");
        if (a.target < 0) {
            cur = -1;
            break;
        }
        vec = to_dense(a.mat) * vec;
        cur = a.target;
    }
    if (cur < 0) return {-1, MatQ::Zero(0, v.cols())};
    return {cur, vec};
}

}  // namespace superkz
