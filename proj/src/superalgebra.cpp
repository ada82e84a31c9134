#include "superkz/superalgebra.hpp"

#include "superkz/linalg.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace superkz {

namespace {

std::vector<int> label_weight(const IndexLabel& l, const std::vector<IndexLabel>& cartan) {
    std::vector<int> w(cartan.size(), 0);
    if (l.is_zero_bar()) return w;
    IndexLabel pos{l.twice, false};
    auto it = std::find(cartan.begin(), cartan.end(), pos);
    if (it == cartan.end()) throw std::logic_error("label outside the Cartan set: " + l.str());
    w[it - cartan.begin()] = l.barred ? -1 : 1;
    return w;
}

std::vector<int> sub(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
    return c;
}

std::vector<int> neg(const std::vector<int>& a) {
    std::vector<int> c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = -a[i];
    return c;
}

bool is_zero_vec(const std::vector<int>& a) {
    return std::all_of(a.begin(), a.end(), [](int v) { return v == 0; });
}

SpQ elementary(int n, int p, int q, const Rational& v = 1) {
    SpQ e(n, n);
    e.insert(p, q) = v;
    return e;
}

// Coefficient matrix of the form-preservation constraints for unknowns on `positions`
// with matrix parity `par`.
MatQ constraint_matrix(const MatQ& b, const std::vector<int>& space_par,
                       const std::vector<std::pair<int, int>>& positions, int par) {
    const int n = static_cast<int>(b.rows());
    std::vector<VecQ> rows;
    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t) {
            VecQ row = VecQ::Zero(static_cast<int>(positions.size()));
            bool nz = false;
            const int sgn = (par * space_par[s]) % 2 ? -1 : 1;
            for (std::size_t k = 0; k < positions.size(); ++k) {
                auto [p, q] = positions[k];
                Rational c = 0;
                if (q == s) c += b(p, t);
                if (q == t) c += sgn * b(s, p);
                if (c != 0) { row(k) = c; nz = true; }
            }
            if (nz) rows.push_back(row);
        }
    }
    MatQ out(static_cast<int>(rows.size()), static_cast<int>(positions.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = rows[r].transpose();
    return out;
}

std::string element_name(ElementKind k, const std::vector<int>& eps, const std::vector<IndexLabel>& cartan,
                          int slot) {
    if (k == ElementKind::Cartan) return "E_" + cartan[slot].str();
    std::ostringstream os;
    os << (k == ElementKind::Raising ? "E_[" : "E^[");
    bool first = true;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (eps[i] == 0) continue;
        if (!first || eps[i] < 0) os << (eps[i] < 0 ? "-" : "+");
        if (std::abs(eps[i]) != 1) os << std::abs(eps[i]);
        os << "e" << cartan[i].str();
        first = false;
    }
    os << "]";
    return os.str();
}

}  // namespace

Rational defining_form(XType x, const IndexLabel& v, const IndexLabel& w) {
    if (x == XType::A) throw std::invalid_argument("defining form undefined for type a");
    if (v.is_zero_bar() || w.is_zero_bar()) return (v.is_zero_bar() && w.is_zero_bar()) ? 1 : 0;
    if (v.barred == w.barred || v.twice != w.twice) return 0;
    if (!v.barred) return 1;  // (v_r | v_r̄) = 1
    const int pr = v.is_half() ? 1 : 0;
    const int sgn = pr ? -1 : 1;  // (−1)^{|r||r|}
    const bool skew = (x == XType::BDot || x == XType::C);
    return skew ? Rational(-sgn) : Rational(sgn);
}

SpQ superbracket(const SpQ& a, int pa, const SpQ& b, int pb) {
    SpQ ab = a * b;
    SpQ ba = b * a;
    SpQ r = ((pa * pb) % 2) ? SpQ(ab + ba) : SpQ(ab - ba);
    r.prune(Rational(0));
    return r;
}

Rational supertrace(const AlgebraInstance& g, const SpQ& a) {
    Rational s = 0;
    for (int p = 0; p < a.rows(); ++p) {
        Rational v = a.coeff(p, p);
        if (v != 0) s += g.space_parity(p) ? -v : v;
    }
    return s;
}

Rational invariant_form(const AlgebraInstance& g, const SpQ& a, const SpQ& b) {
    SpQ ab = a * b;
    Rational s = supertrace(g, ab);
    return g.x == XType::A ? s : s / 2;
}

Rational cocycle_tau(const AlgebraInstance& g, const SpQ& a, const SpQ& b) {
    SpQ j = g.j_matrix();
    SpQ ja = j * a - a * j;
    SpQ p = ja * b;
    return supertrace(g, p);
}

Rational iota_k(const AlgebraInstance& g, const SpQ& a) {
    SpQ j = g.j_matrix();
    SpQ p = j * a;
    return supertrace(g, p);
}

int AlgebraInstance::space_pos(const IndexLabel& l) const {
    auto it = std::lower_bound(space.begin(), space.end(), l);
    return (it != space.end() && *it == l) ? static_cast<int>(it - space.begin()) : -1;
}

int AlgebraInstance::cartan_pos(const IndexLabel& l) const {
    auto it = std::lower_bound(cartan.begin(), cartan.end(), l);
    return (it != cartan.end() && *it == l) ? static_cast<int>(it - cartan.begin()) : -1;
}

int AlgebraInstance::space_parity(int pos) const { return parity(space[pos], x); }

Rational AlgebraInstance::form(int a, int b) const { return form(basis[a].mat, basis[b].mat); }

Rational AlgebraInstance::form(const SpQ& a, const SpQ& b) const { return invariant_form(*this, a, b); }

SpQ AlgebraInstance::j_matrix() const {
    const int n = static_cast<int>(space.size());
    SpQ j(n, n);
    for (int p = 0; p < n; ++p)
        if (!space[p].barred && space[p].twice > 0) j.insert(p, p) = -1;
    return j;
}

std::optional<std::vector<int>> AlgebraInstance::simple_coords(const std::vector<Rational>& eps) const {
    VecQ v(static_cast<int>(eps.size()));
    for (std::size_t i = 0; i < eps.size(); ++i) v(i) = eps[i];
    const int r = static_cast<int>(simple_matrix_.cols());
    if (r == 0) {
        if (v.isZero()) return std::vector<int>{};
        return std::nullopt;
    }
    VecQ c = simple_left_inverse_ * v;
    if (simple_matrix_ * c != v) return std::nullopt;
    std::vector<int> out(r);
    for (int i = 0; i < r; ++i) {
        if (!is_integer(c(i))) return std::nullopt;
        out[i] = static_cast<int>(to_long(c(i)));
    }
    return out;
}

std::vector<std::pair<int, Rational>> AlgebraInstance::decompose(const SpQ& a) const {
    std::map<int, Rational> coef;
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SpQ::InnerIterator it(a, k); it; ++it) {
            if (it.value() == 0) continue;
            const int p = static_cast<int>(it.row()), q = static_cast<int>(it.col());
            if (p == q) {
                const IndexLabel& l = space[p];
                if (!l.barred && !l.is_zero_bar()) coef[cartan_index(cartan_pos(l))] = it.value();
                continue;
            }
            auto own = entry_owner_.find({p, q});
            if (own == entry_owner_.end()) throw std::logic_error("decompose: entry outside any root space");
            coef[own->second.first] = it.value() / own->second.second;
        }
    }
    std::vector<std::pair<int, Rational>> out;
    SpQ rebuilt(a.rows(), a.cols());
    for (auto& [b, c] : coef) {
        if (c == 0) continue;
        out.emplace_back(b, c);
        rebuilt += c * basis[b].mat;
    }
    if (!equal(rebuilt, a)) throw std::logic_error("decompose: matrix not in the algebra span");
    return out;
}

void AlgebraInstance::finalize() {
    entry_owner_.clear();
    for (int b = 0; b < dim(); ++b) {
        if (basis[b].kind == ElementKind::Cartan) continue;
        const SpQ& mt = basis[b].mat;
        for (int k = 0; k < mt.outerSize(); ++k)
            for (SpQ::InnerIterator it(mt, k); it; ++it)
                entry_owner_[{static_cast<int>(it.row()), static_cast<int>(it.col())}] = {b, it.value()};
    }
    const int d = dim();
    brackets_.assign(static_cast<std::size_t>(d) * d, Bracket{});
    SpQ j = j_matrix();
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            SpQ c = superbracket(basis[a].mat, basis[a].parity, basis[b].mat, basis[b].parity);
            Bracket br;
            if (!is_zero(c)) br.terms = decompose(c);
            if (central) {
                SpQ ja = j * basis[a].mat - basis[a].mat * j;
                SpQ p = ja * basis[b].mat;
                br.k = supertrace(*this, p);
            }
            brackets_[a * d + b] = std::move(br);
        }
    }
}

AlgebraPtr build_algebra(Series s, XType x, int m, int n, bool central) {
    if (m < 0 || n <= 0) throw std::invalid_argument("invalid ranks");
    auto g = std::make_shared<AlgebraInstance>();
    g->series = s;
    g->x = x;
    g->m = m;
    g->n = n;
    g->central = central;
    g->space = vector_space_labels(s, x, m, n);
    g->cartan = build_index_set(s, true, m, n);
    const int N = static_cast<int>(g->space.size());
    const int C = static_cast<int>(g->cartan.size());

    std::vector<int> spar(N);
    std::vector<std::vector<int>> lw(N);
    for (int p = 0; p < N; ++p) {
        spar[p] = parity(g->space[p], x);
        lw[p] = label_weight(g->space[p], g->cartan);
    }
    MatQ form = MatQ::Zero(N, N);
    if (x != XType::A)
        for (int p = 0; p < N; ++p)
            for (int q = 0; q < N; ++q) form(p, q) = defining_form(x, g->space[p], g->space[q]);
    g->form_matrix = form;

    std::map<std::vector<int>, std::vector<std::pair<int, int>>> groups;
    for (int p = 0; p < N; ++p)
        for (int q = 0; q < N; ++q)
            if (p != q) groups[sub(lw[p], lw[q])].push_back({p, q});

    // Cartan elements
    for (int j = 0; j < C; ++j) {
        BasisElement e;
        e.kind = ElementKind::Cartan;
        e.slot = j;
        e.eps.assign(C, 0);
        const int p = g->space_pos(g->cartan[j]);
        SpQ mt = elementary(N, p, p);
        if (x != XType::A) mt.coeffRef(g->space_pos(g->cartan[j].bar()), g->space_pos(g->cartan[j].bar())) = -1;
        e.mat = mt;
        e.parity = 0;
        e.name = element_name(e.kind, e.eps, g->cartan, j);
        g->basis.push_back(std::move(e));
    }

    struct RootVec {
        std::vector<int> eps;
        SpQ mat;
        int parity;
        std::pair<int, int> first;
    };
    std::vector<RootVec> pos_roots;
    std::map<std::vector<int>, SpQ> neg_vecs;
    for (auto& [w, positions] : groups) {
        if (is_zero_vec(w)) throw std::logic_error("off-diagonal position with zero weight");
        const int par = (spar[positions[0].first] + spar[positions[0].second]) % 2;
        VecQ v;
        if (x == XType::A) {
            if (positions.size() != 1) throw std::logic_error("type a root space not one-dimensional");
            v = VecQ::Ones(1);
        } else {
            MatQ cm = constraint_matrix(form, spar, positions, par);
            MatQ ns = cm.rows() ? nullspace(cm) : MatQ::Identity(positions.size(), positions.size());
            if (ns.cols() == 0) continue;
            if (ns.cols() != 1) throw std::logic_error("root space of dimension > 1");
            v = ns.col(0);
        }
        int first = -1;
        for (int k = 0; k < v.size(); ++k)
            if (v(k) != 0) { first = k; break; }
        v /= Rational(v(first));
        SpQ mt(N, N);
        bool upper = false, lower = false;
        for (int k = 0; k < v.size(); ++k) {
            if (v(k) == 0) continue;
            mt.insert(positions[k].first, positions[k].second) = v(k);
            (positions[k].first < positions[k].second ? upper : lower) = true;
        }
        if (upper && lower) throw std::logic_error("root vector is not triangular");
        if (upper) pos_roots.push_back({w, mt, par, positions[first]});
        else neg_vecs[w] = mt;
    }

    // simple roots: positive roots not a sum of two positive roots
    std::map<std::vector<int>, int> pos_index;
    for (std::size_t r = 0; r < pos_roots.size(); ++r) pos_index[pos_roots[r].eps] = static_cast<int>(r);
    std::vector<int> simple_candidates;
    for (std::size_t r = 0; r < pos_roots.size(); ++r) {
        bool decomposable = false;
        for (std::size_t t = 0; t < pos_roots.size() && !decomposable; ++t)
            if (pos_index.count(sub(pos_roots[r].eps, pos_roots[t].eps))) decomposable = true;
        if (!decomposable) simple_candidates.push_back(static_cast<int>(r));
    }
    std::sort(simple_candidates.begin(), simple_candidates.end(),
              [&](int a, int b) { return pos_roots[a].first < pos_roots[b].first; });
    const int R = static_cast<int>(simple_candidates.size());
    MatQ smat(C, R);
    for (int s2 = 0; s2 < R; ++s2)
        for (int i = 0; i < C; ++i) smat(i, s2) = pos_roots[simple_candidates[s2]].eps[i];
    if (R && rank(smat) != R) throw std::logic_error("simple roots are linearly dependent");
    g->simple_matrix_ = smat;
    if (R) {
        MatQ sts = smat.transpose() * smat;
        MatQ inv = MatQ::Identity(R, R);
        MatQ aug(R, 2 * R);
        aug << sts, inv;
        rref(aug);
        g->simple_left_inverse_ = aug.rightCols(R) * smat.transpose();
    }

    auto coords_of = [&](const std::vector<int>& eps) {
        std::vector<Rational> e(eps.begin(), eps.end());
        auto c = g->simple_coords(e);
        if (!c) throw std::logic_error("positive root outside the simple root lattice");
        for (int v : *c)
            if (v < 0) throw std::logic_error("positive root with a negative simple coordinate");
        return *c;
    };

    std::vector<RootDatum> data;
    std::vector<int> order(pos_roots.size());
    for (std::size_t r = 0; r < pos_roots.size(); ++r) order[r] = static_cast<int>(r);
    std::vector<std::vector<int>> coords(pos_roots.size());
    std::vector<int> height(pos_roots.size());
    for (std::size_t r = 0; r < pos_roots.size(); ++r) {
        coords[r] = coords_of(pos_roots[r].eps);
        height[r] = 0;
        for (int v : coords[r]) height[r] += v;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (height[a] != height[b]) return height[a] < height[b];
        return pos_roots[a].first < pos_roots[b].first;
    });

    std::vector<char> levi_simple(R, 0);
    for (int s2 = 0; s2 < R; ++s2) {
        const auto& e = pos_roots[simple_candidates[s2]].eps;
        int plus = -1, minus = -1, other = 0;
        for (int i = 0; i < C; ++i) {
            if (e[i] == 1 && plus < 0) plus = i;
            else if (e[i] == -1 && minus < 0) minus = i;
            else if (e[i] != 0) ++other;
        }
        levi_simple[s2] = (plus >= 0 && minus >= 0 && other == 0 && g->cartan[plus].twice > 0 &&
                           g->cartan[minus].twice > 0);
    }

    const int P = static_cast<int>(pos_roots.size());
    std::vector<BasisElement> raising(P), lowering(P);
    g->roots.resize(P);
    for (int k = 0; k < P; ++k) {
        const RootVec& rv = pos_roots[order[k]];
        RootDatum rd;
        rd.eps = rv.eps;
        rd.parity = rv.parity;
        rd.coords = coords[order[k]];
        rd.height = height[order[k]];
        rd.levi = true;
        for (int s2 = 0; s2 < R; ++s2)
            if (rd.coords[s2] != 0 && !levi_simple[s2]) rd.levi = false;
        auto nit = neg_vecs.find(neg(rv.eps));
        if (nit == neg_vecs.end()) throw std::logic_error("missing negative root vector");
        Rational pairing = invariant_form(*g, rv.mat, nit->second);
        if (pairing == 0) throw std::logic_error("degenerate root pairing");
        SpQ low = nit->second / pairing;
        rd.raising = C + k;
        rd.lowering = C + P + k;
        rd.pairing = invariant_form(*g, rv.mat, low);
        raising[k] = {ElementKind::Raising, k, rv.mat, rv.parity, rv.eps, element_name(ElementKind::Raising, rv.eps, g->cartan, k)};
        lowering[k] = {ElementKind::Lowering, k, low, rv.parity, neg(rv.eps),
                       element_name(ElementKind::Lowering, rv.eps, g->cartan, k)};
        g->roots[k] = rd;
    }
    for (auto& e : raising) g->basis.push_back(std::move(e));
    for (auto& e : lowering) g->basis.push_back(std::move(e));
    for (int s2 = 0; s2 < R; ++s2)
        for (int k = 0; k < P; ++k)
            if (order[k] == simple_candidates[s2]) g->simple.push_back(k);

    // the simple matrix is stored in label order of the simple candidates; keep it aligned with g->simple
    g->finalize();
    return g;
}

int brute_force_dimension(Series s, XType x, int m, int n) {
    auto space = vector_space_labels(s, x, m, n);
    const int N = static_cast<int>(space.size());
    if (x == XType::A) return N * N;
    std::vector<int> spar(N);
    for (int p = 0; p < N; ++p) spar[p] = parity(space[p], x);
    MatQ form(N, N);
    for (int p = 0; p < N; ++p)
        for (int q = 0; q < N; ++q) form(p, q) = defining_form(x, space[p], space[q]);
    int total = 0;
    for (int par = 0; par < 2; ++par) {
        std::vector<std::pair<int, int>> pos;
        for (int p = 0; p < N; ++p)
            for (int q = 0; q < N; ++q)
                if ((spar[p] + spar[q]) % 2 == par) pos.push_back({p, q});
        MatQ cm = constraint_matrix(form, spar, pos, par);
        total += static_cast<int>(pos.size()) - rank(cm);
    }
    return total;
}

SpQ transport_matrix(const AlgebraInstance& sub, const SpQ& a, const AlgebraInstance& big) {
    const int N = static_cast<int>(big.space.size());
    std::vector<TripletQ> t;
    for (int k = 0; k < a.outerSize(); ++k)
        for (SpQ::InnerIterator it(a, k); it; ++it) {
            int p = big.space_pos(sub.space[it.row()]);
            int q = big.space_pos(sub.space[it.col()]);
            if (p < 0 || q < 0) throw std::invalid_argument("transport: label missing in target algebra");
            t.emplace_back(p, q, it.value());
        }
    SpQ out(N, N);
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

Embedding embed(const AlgebraInstance& sub, const AlgebraInstance& big) {
    if (sub.x != big.x || sub.m != big.m) throw std::invalid_argument("embed: incompatible algebras");
    Embedding e;
    for (const auto& l : sub.cartan) {
        int p = big.cartan_pos(l);
        if (p < 0) throw std::invalid_argument("embed: Cartan label missing");
        e.cartan_map.push_back(p);
    }
    std::map<std::vector<int>, int> big_root;
    for (int r = 0; r < big.num_roots(); ++r) big_root[big.roots[r].eps] = r;
    for (int b = 0; b < sub.dim(); ++b) {
        const BasisElement& be = sub.basis[b];
        SpQ mt = transport_matrix(sub, be.mat, big);
        int target = -1;
        if (be.kind == ElementKind::Cartan) {
            target = big.cartan_index(e.cartan_map[be.slot]);
        } else {
            std::vector<int> eps(big.cartan.size(), 0);
            const auto& reps = sub.roots[be.slot].eps;
            for (std::size_t i = 0; i < reps.size(); ++i) eps[e.cartan_map[i]] = reps[i];
            auto it = big_root.find(eps);
            if (it == big_root.end()) throw std::invalid_argument("embed: root missing in target algebra");
            target = be.kind == ElementKind::Raising ? big.raising_index(it->second) : big.lowering_index(it->second);
        }
        const SpQ& tm = big.basis[target].mat;
        Rational scale = 0;
        for (int k = 0; k < mt.outerSize() && scale == 0; ++k)
            for (SpQ::InnerIterator it(mt, k); it; ++it) {
                Rational bv = tm.coeff(it.row(), it.col());
                if (bv == 0) throw std::invalid_argument("embed: matrices differ in support");
                scale = it.value() / bv;
                break;
            }
        SpQ scaled = scale * tm;
        if (!equal(scaled, mt)) throw std::invalid_argument("embed: element is not a multiple of the target");
        e.target.push_back(target);
        e.scale.push_back(scale);
    }
    return e;
}

nlohmann::json AlgebraInstance::to_json() const {
    nlohmann::json j;
    j["series"] = to_string(series);
    j["type"] = to_string(x);
    j["m"] = m;
    j["n"] = n;
    j["central"] = central;
    j["dimension"] = dim();
    std::vector<std::string> sl;
    for (auto& l : space) sl.push_back(l.str());
    j["space"] = sl;
    std::vector<std::string> cl;
    for (auto& l : cartan) cl.push_back(l.str());
    j["cartan"] = cl;
    nlohmann::json basis_j = nlohmann::json::array();
    for (int b = 0; b < dim(); ++b) {
        nlohmann::json e;
        e["index"] = b;
        e["name"] = basis[b].name;
        e["parity"] = basis[b].parity;
        nlohmann::json entries = nlohmann::json::array();
        const SpQ& mt = basis[b].mat;
        std::vector<std::tuple<int, int, Rational>> ent;
        for (int k = 0; k < mt.outerSize(); ++k)
            for (SpQ::InnerIterator it(mt, k); it; ++it)
                ent.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        std::sort(ent.begin(), ent.end(), [](auto& a, auto& b) {
            return std::make_pair(std::get<0>(a), std::get<1>(a)) < std::make_pair(std::get<0>(b), std::get<1>(b));
        });
        for (auto& [r, c, v] : ent) entries.push_back({space[r].str(), space[c].str(), to_string(v)});
        e["entries"] = entries;
        basis_j.push_back(e);
    }
    j["basis"] = basis_j;
    nlohmann::json roots_j = nlohmann::json::array();
    for (const auto& r : roots) {
        nlohmann::json rj;
        nlohmann::json eps = nlohmann::json::object();
        for (std::size_t i = 0; i < r.eps.size(); ++i)
            if (r.eps[i]) eps[cartan[i].str()] = std::to_string(r.eps[i]);
        rj["root"] = eps;
        rj["parity"] = r.parity;
        rj["height"] = r.height;
        rj["coords"] = r.coords;
        rj["levi"] = r.levi;
        rj["raising"] = r.raising;
        rj["lowering"] = r.lowering;
        rj["pairing"] = to_string(r.pairing);
        roots_j.push_back(rj);
    }
    j["positive_roots"] = roots_j;
    j["simple_roots"] = simple;
    return j;
}

std::string AlgebraInstance::describe() const {
    std::ostringstream os;
    os << to_string(series) << "/" << to_string(x) << "(m=" << m << ",n=" << n << (central ? ",K" : "") << ")";
    return os.str();
}

}  // namespace superkz
