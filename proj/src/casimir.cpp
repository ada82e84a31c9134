#include "superkz/casimir.hpp"

#include <stdexcept>

namespace superkz {

RhoData rho_for(const AlgebraInstance& g) { return rho_data(g.series, g.x, g.m, g.n); }

CasimirElement casimir_element(const AlgebraInstance& g, bool with_k) {
    CasimirElement c;
    for (const auto& r : g.roots) c.quad.push_back({r.lowering, r.raising, Rational(2)});
    for (int j = 0; j < g.cartan_dim(); ++j) {
        const IndexLabel& l = g.cartan[j];
        c.quad.push_back({g.cartan_index(j), g.cartan_index(j), Rational(sign2j(l))});
        if (with_k && delta(l)) c.quad.push_back({kCentralK, g.cartan_index(j), Rational(-2)});
    }
    const RhoData rho = rho_for(g);
    for (const auto& l : g.cartan) c.linear.push_back(2 * rho.varrho.at(l));
    return c;
}

namespace {

void add_cartan_part(const AlgebraInstance& g, BilinearOperator& op, const Rational& scale, bool with_k) {
    for (int j = 0; j < g.cartan_dim(); ++j) {
        const IndexLabel& l = g.cartan[j];
        const int e = g.cartan_index(j);
        op.terms.push_back({e, e, scale * sign2j(l)});
        if (with_k && delta(l)) {
            op.terms.push_back({kCentralK, e, -scale});
            op.terms.push_back({e, kCentralK, -scale});
        }
    }
}

}  // namespace

BilinearOperator casimir_tensor(const AlgebraInstance& g, bool with_k) {
    BilinearOperator op;
    for (const auto& r : g.roots) {
        op.terms.push_back({r.lowering, r.raising, Rational(1)});
        op.terms.push_back({r.raising, r.lowering, Rational(r.parity ? -1 : 1)});
    }
    add_cartan_part(g, op, 1, with_k);
    return op;
}

TrigKernels trig_kernels(const AlgebraInstance& g, bool with_k) {
    TrigKernels k;
    add_cartan_part(g, k.zero, Rational(1, 2), with_k);
    k.plus = k.zero;
    k.minus = k.zero;
    for (const auto& r : g.roots) {
        k.plus.terms.push_back({r.raising, r.lowering, Rational(r.parity ? -1 : 1)});
        k.minus.terms.push_back({r.lowering, r.raising, Rational(1)});
    }
    return k;
}

namespace {

// x acting on a module block; K acts by the level.
std::pair<int, MatQ> module_apply(const WeightModule& m, int x, int block, const MatQ& v) {
    if (x == kCentralK) return {block, v * m.level()};
    const BlockAction& a = m.act(x, block);
    if (a.lost) throw std::runtime_error("module_apply: beyond truncation");
    if (a.target < 0) return {-1, MatQ()};
    return {a.target, to_dense(a.mat) * v};
}

MatQ cartan_diag(const std::vector<Rational>& lin, const AlgebraInstance& g, const Weight& w, int dim) {
    Rational v = 0;
    for (int j = 0; j < g.cartan_dim(); ++j) v += lin[j] * w[g.cartan[j]];
    return MatQ::Identity(dim, dim) * v;
}

Weight strip_level(const Weight& w) {
    Weight o = w;
    o.level = 0;
    return o;
}

TensorAction delta_k(const TensorModule& t, int x, const std::vector<int>& coords) {
    if (x != kCentralK) return t.delta_action(x, coords);
    TensorAction a;
    a.target = coords;
    Rational total = 0;
    for (const auto& f : t.factors) total += f->level();
    const int dim = t.block(coords).dim;
    a.mat = to_sparse(MatQ::Identity(dim, dim) * total);
    a.zero = total == 0 || dim == 0;
    return a;
}

}  // namespace

MatQ casimir_on_block(const WeightModule& m, int block, bool with_k) {
    const AlgebraInstance& g = *m.algebra;
    const CasimirElement c = casimir_element(g, with_k);
    const int dim = m.blocks[block].dim;
    MatQ out = cartan_diag(c.linear, g, m.blocks[block].weight, dim);
    const MatQ id = MatQ::Identity(dim, dim);
    for (const auto& q : c.quad) {
        auto [t1, v1] = module_apply(m, q.b, block, id);
        if (t1 < 0) continue;
        auto [t2, v2] = module_apply(m, q.a, t1, v1);
        if (t2 < 0) continue;
        if (t2 != block) throw std::logic_error("casimir_on_block: weight not preserved");
        out += q.coef * v2;
    }
    return out;
}

MatQ apply_bilinear(const TensorModule& t, const BilinearOperator& op, int i, int j, const std::vector<int>& coords) {
    if (i == j) throw std::invalid_argument("apply_bilinear: sites must differ");
    const int dim = t.block(coords).dim;
    MatQ out = MatQ::Zero(dim, dim);
    for (const auto& q : op.terms) out += q.coef * t.product(i, q.a, j, q.b, coords);
    return out;
}

MatQ omega_ij(const TensorModule& t, int i, int j, const std::vector<int>& coords, bool with_k) {
    return apply_bilinear(t, casimir_tensor(*t.algebra, with_k), i, j, coords);
}

MatQ casimir_site(const TensorModule& t, int site, const std::vector<int>& coords, bool with_k) {
    const AlgebraInstance& g = *t.algebra;
    const CasimirElement c = casimir_element(g, with_k);
    MatQ out = t.site_cartan(site, c.linear, 0, coords);
    for (const auto& q : c.quad) out += q.coef * t.product(site, q.a, site, q.b, coords);
    return out;
}

MatQ delta_casimir(const TensorModule& t, const std::vector<int>& coords, bool with_k) {
    const AlgebraInstance& g = *t.algebra;
    const CasimirElement c = casimir_element(g, with_k);
    const TensorBlock& tb = t.block(coords);
    MatQ out = cartan_diag(c.linear, g, tb.weight, tb.dim);
    for (const auto& q : c.quad) {
        TensorAction a1 = delta_k(t, q.b, coords);
        if (a1.lost) throw std::runtime_error("delta_casimir: beyond truncation");
        if (a1.zero) continue;
        TensorAction a2 = delta_k(t, q.a, a1.target);
        if (a2.lost) throw std::runtime_error("delta_casimir: beyond truncation");
        if (a2.zero) continue;
        out += q.coef * (to_dense(a2.mat) * to_dense(a1.mat));
    }
    return out;
}

MatQ gaudin(const TensorModule& t, int i, const std::vector<Rational>& z, const std::vector<int>& coords, bool with_k) {
    const int dim = t.block(coords).dim;
    MatQ out = MatQ::Zero(dim, dim);
    for (int j = 0; j < t.sites(); ++j) {
        if (j == i) continue;
        if (z[i] == z[j]) throw std::invalid_argument("gaudin: coincident points");
        out += omega_ij(t, i, j, coords, with_k) / (z[i] - z[j]);
    }
    return out;
}

MatQ trig_r(const TensorModule& t, int i, int j, const Rational& zi, const Rational& zj,
            const std::vector<int>& coords, bool with_k) {
    if (zi == zj) throw std::invalid_argument("trig_r: pole at z = 1");
    const TrigKernels k = trig_kernels(*t.algebra, with_k);
    return (zi * apply_bilinear(t, k.plus, i, j, coords) + zj * apply_bilinear(t, k.minus, i, j, coords)) / (zi - zj);
}

MatQ h_gamma(const TensorModule& t, const Weight& gamma, int site, const std::vector<int>& coords, bool with_k) {
    const TensorBlock& tb = t.block(coords);
    MatQ out = MatQ::Zero(tb.dim, tb.dim);
    const Weight g = with_k ? gamma : strip_level(gamma);
    for (std::size_t ci = 0; ci < tb.combos.size(); ++ci) {
        Weight w = site < 0 ? tb.weight : t.factors[site]->blocks[tb.combos[ci][site]].weight;
        if (!with_k) w = strip_level(w);
        const Rational v = hstar_form(g, w);
        const int end = ci + 1 < tb.combos.size() ? tb.offsets[ci + 1] : tb.dim;
        for (int k = tb.offsets[ci]; k < end; ++k) out(k, k) = v;
    }
    return out;
}

MatQ rho_site(const TensorModule& t, int site, const std::vector<int>& coords) {
    const RhoData rho = rho_for(*t.algebra);
    std::vector<Rational> lin;
    for (const auto& l : t.algebra->cartan) lin.push_back(rho.varrho.at(l));
    return t.site_cartan(site, lin, 0, coords);
}

std::pair<MatQ, MatQ> trig_reduction_sides(const TensorModule& t, int i, const std::vector<int>& coords, bool with_k) {
    const AlgebraInstance& g = *t.algebra;
    const TensorBlock& tb = t.block(coords);
    const TrigKernels k = trig_kernels(g, with_k);
    MatQ lhs = MatQ::Zero(tb.dim, tb.dim);
    for (int j = 0; j < t.sites(); ++j)
        if (j != i) lhs += apply_bilinear(t, k.minus, i, j, coords);
    lhs -= h_gamma(t, tb.weight, i, coords, with_k) / 2 + rho_site(t, i, coords);

    MatQ rhs = -casimir_site(t, i, coords, with_k) / 2;
    for (const auto& r : g.roots) {
        TensorAction a1 = t.delta_action(r.raising, coords);
        if (a1.zero) continue;
        const TensorAction& a2 = t.site_action(i, r.lowering, a1.target);
        if (a2.lost) throw std::runtime_error("trig_reduction_sides: beyond truncation");
        if (a2.zero) continue;
        rhs += to_dense(a2.mat) * to_dense(a1.mat);
    }
    return {lhs, rhs};
}

}  // namespace superkz
