#include "superkz/experiments.hpp"

#include "superkz/kz.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>

namespace superkz {

using json = nlohmann::json;

json to_json(const Report& r) {
    json a = json::array();
    for (const auto& x : r.assertions) a.push_back({{"name", x.name}, {"pass", x.pass}, {"detail", x.detail}});
    return {{"experiment", r.experiment}, {"pass", r.pass}, {"seed", r.seed},
            {"seconds", r.seconds}, {"assertions", a}, {"data", r.data}};
}

const std::vector<ExperimentInfo>& experiment_catalog() {
    static const std::vector<ExperimentInfo> cat = {
        {"scalar_identity", "Casimir scalars of matched tilde/plain/bar weights agree on random dominant specs",
         "Casimir scalar identity across the three series"},
        {"casimir_eigenvalue", "Casimir element acts on Verma modules by (λ+2ρ,λ)",
         "Casimir action on highest weight modules"},
        {"gaudin_commute", "Ω commutes with the coproduct; Gaudin Hamiltonians commute; Ω^(ij) = Ω^(ji)",
         "Gaudin Hamiltonians and the Casimir tensor"},
        {"oc_identity", "Ω = ½(Δ(c) − c⊗1 − 1⊗c) on tensor products",
         "Casimir tensor from the coproduct of the Casimir element"},
        {"kz_ell2", "Two-point KZ: exponents, closed-form solutions and transport",
         "Rational KZ equations, two points"},
        {"kz_transport", "Parallel transport: flatness on homotopic paths, zero transport, pole detection",
         "Rational KZ equations, parallel transport"},
        {"truncation_stability", "Truncation functors on modules, KZ systems and singular solutions",
         "Truncation functors and solution spaces"},
        {"superduality_bijection", "Functors T, T̄ and transfer maps between singular solution spaces",
         "Super duality on singular solutions"},
        {"central_ext_correction", "Ring-side versus centrally extended Casimir tensors and solution corrections",
         "Central extension and scalar corrections"},
        {"trig_suite", "Trigonometric KZ: reduction identity, singular solution dimensions, transferred solutions",
         "Trigonometric KZ equations"},
    };
    return cat;
}

namespace {

using Rng = std::mt19937_64;

std::string qs(const Rational& q) { return to_string(q); }

bool is_zero(const MatQ& a) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0) return false;
    return true;
}

MatQ identity(int n) { return MatQ::Identity(n, n); }

// ---------------------------------------------------------------- configuration parsing

class Params {
public:
    Params(const json& j, json& errors, std::string where) : j_(j), errors_(errors), where_(std::move(where)) {
        if (!j_.is_object()) error("expected an object");
    }

    void error(const std::string& msg) { errors_.push_back(where_.empty() ? msg : where_ + ": " + msg); }
    bool has(const char* k) const { return j_.is_object() && j_.contains(k); }
    const json& raw(const char* k) const { return j_.at(k); }
    std::string where(const std::string& k) const { return where_.empty() ? k : where_ + "." + k; }
    json& errors() { return errors_; }

    int integer(const char* k, int def, int lo, int hi) {
        if (!has(k)) return def;
        const json& v = j_.at(k);
        if (!v.is_number_integer()) {
            error(std::string(k) + " must be an integer");
            return def;
        }
        const long x = v.get<long>();
        if (x < lo || x > hi) {
            error(std::string(k) + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            return def;
        }
        return static_cast<int>(x);
    }

    bool boolean(const char* k, bool def) {
        if (!has(k)) return def;
        if (!j_.at(k).is_boolean()) {
            error(std::string(k) + " must be a boolean");
            return def;
        }
        return j_.at(k).get<bool>();
    }

    double real(const char* k, double def, double lo, double hi) {
        if (!has(k)) return def;
        const json& v = j_.at(k);
        if (!v.is_number()) {
            error(std::string(k) + " must be a number");
            return def;
        }
        const double x = v.get<double>();
        if (!(x >= lo && x <= hi)) {
            error(std::string(k) + " out of range");
            return def;
        }
        return x;
    }

    std::optional<Rational> as_rational(const json& v, const std::string& what) {
        try {
            if (v.is_string()) return parse_rational(v.get<std::string>());
            if (v.is_number_integer()) return Rational(v.get<long>());
        } catch (const std::exception&) {
        }
        error(what + " must be an integer or a \"p/q\" string");
        return std::nullopt;
    }

    Rational rational(const char* k, const Rational& def) {
        if (!has(k)) return def;
        auto q = as_rational(j_.at(k), k);
        return q ? *q : def;
    }

    std::vector<Rational> rationals(const char* k, std::vector<Rational> def) {
        if (!has(k)) return def;
        if (!j_.at(k).is_array()) {
            error(std::string(k) + " must be an array");
            return def;
        }
        std::vector<Rational> out;
        for (const auto& v : j_.at(k)) {
            auto q = as_rational(v, k);
            out.push_back(q ? *q : Rational(0));
        }
        return out;
    }

    std::string choice(const char* k, const std::string& def, const std::vector<std::string>& allowed) {
        if (!has(k)) return def;
        if (!j_.at(k).is_string()) {
            error(std::string(k) + " must be a string");
            return def;
        }
        std::string s = j_.at(k).get<std::string>();
        if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
            error(std::string(k) + ": unknown value \"" + s + "\"");
            return def;
        }
        return s;
    }

    // Points as arrays of numbers or [re, im] pairs.
    Point point(const char* k, Point def) {
        if (!has(k)) return def;
        const json& v = j_.at(k);
        if (!v.is_array()) {
            error(std::string(k) + " must be an array of complex numbers");
            return def;
        }
        Point out;
        for (const auto& e : v) {
            if (e.is_number()) out.emplace_back(e.get<double>(), 0.0);
            else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
                out.emplace_back(e[0].get<double>(), e[1].get<double>());
            else {
                error(std::string(k) + " entries must be numbers or [re, im] pairs");
                return def;
            }
        }
        return out;
    }

private:
    const json& j_;
    json& errors_;
    std::string where_;
};

const std::vector<std::string> kSeries = {"tilde", "plain", "bar"};
const std::vector<std::string> kTypes = {"a", "b", "b_bullet", "c", "d"};

struct Inst {
    Series s = Series::Plain;
    XType x = XType::A;
    int m = 0, n = 1;
};

std::string label(const Inst& in) {
    return to_string(in.s) + " " + to_string(in.x) + " (m=" + std::to_string(in.m) + ", n=" + std::to_string(in.n) +
           ")";
}

Inst parse_inst(Params& p, Inst def) {
    Inst in = def;
    in.s = parse_series(p.choice("series", to_string(def.s), kSeries));
    in.x = parse_xtype(p.choice("type", to_string(def.x), kTypes));
    in.m = p.integer("m", def.m, 0, 4);
    in.n = p.integer("n", def.n, 1, 6);
    return in;
}

std::optional<DominantWeightSpec> parse_spec(const json& j, Params& p, const std::string& what) {
    try {
        DominantWeightSpec s = spec_from_json(j);
        const auto& lp = j.at("lambda_plus");
        for (std::size_t i = 0; i < lp.size(); ++i)
            if (lp[i].get<int>() < 0 || (i > 0 && lp[i].get<int>() > lp[i - 1].get<int>()))
                throw std::invalid_argument("not a partition");
        return s;
    } catch (const std::exception& e) {
        p.error(what + ": invalid weight spec (" + e.what() + ")");
        return std::nullopt;
    }
}

std::vector<DominantWeightSpec> parse_specs(Params& p, const char* k, std::vector<DominantWeightSpec> def) {
    if (!p.has(k)) return def;
    if (!p.raw(k).is_array()) {
        p.error(std::string(k) + " must be an array of weight specs");
        return def;
    }
    std::vector<DominantWeightSpec> out;
    for (const auto& e : p.raw(k)) {
        auto s = parse_spec(e, p, k);
        if (s) out.push_back(*s);
    }
    return out;
}

DominantWeightSpec spec_of(std::vector<int> parts, Rational d = 0, std::vector<Rational> head = {}) {
    DominantWeightSpec s;
    s.lambda_plus = Partition(std::move(parts));
    s.d = d;
    s.head = std::move(head);
    return s;
}

std::optional<Weight> resolve_spec(const DominantWeightSpec& s, const Inst& in, Params& p, const std::string& what) {
    try {
        validate_spec(s, in.x, in.m);
        return make_weight(s, in.s, in.x, in.m, in.n);
    } catch (const std::exception& e) {
        p.error(what + ": " + e.what());
        return std::nullopt;
    }
}

// Explicit weights: {"eps": {"1": 2, "1/2": "1/3"}, "level": "1/2"}.
std::optional<Weight> parse_explicit_weight(const json& j, Params& p, const std::string& what) {
    try {
        Weight w;
        for (auto it = j.at("eps").begin(); it != j.at("eps").end(); ++it) {
            auto q = p.as_rational(it.value(), what);
            if (!q) return std::nullopt;
            w.set(IndexLabel::parse(it.key()), *q);
        }
        if (j.contains("level")) {
            auto q = p.as_rational(j.at("level"), what);
            if (!q) return std::nullopt;
            w.level = *q;
        }
        return w;
    } catch (const std::exception& e) {
        p.error(what + ": invalid explicit weight (" + e.what() + ")");
        return std::nullopt;
    }
}

Rational rand_q(Rng& rng, int num, int den) {
    std::uniform_int_distribution<int> a(-num, num), b(1, den);
    return Rational(a(rng), b(rng));
}

Weight random_weight(const AlgebraInstance& g, Rng& rng) {
    Weight w;
    for (const auto& l : g.cartan) w.set(l, rand_q(rng, 7, 5));
    w.level = rand_q(rng, 5, 4);
    return w;
}

ModulePtr make_module(AlgebraPtr g, const Weight& w, const std::string& kind, int depth) {
    if (kind == "verma") return build_verma(g, w, depth);
    ModulePtr p = parabolic_verma(g, w, depth);
    if (kind == "irreducible") return irreducible_quotient(p);
    return p;
}

const std::vector<std::string> kKinds = {"verma", "parabolic", "irreducible"};

int depth_below(const AlgebraInstance& g, const Weight& top, const Weight& w) {
    auto c = g.simple_coords(weight_coords(top - w, g.cartan));
    if (!c) throw std::invalid_argument("weight " + w.str() + " is not below " + top.str());
    int d = 0;
    for (int x : *c) {
        if (x < 0) throw std::invalid_argument("weight " + w.str() + " is not below " + top.str());
        d += x;
    }
    return d;
}

// ---------------------------------------------------------------- recording

class Run {
public:
    explicit Run(Report& r) : r_(r) {}
    void check(const std::string& name, bool ok, json detail = json::object()) {
        r_.assertions.push_back({name, ok, std::move(detail)});
        r_.pass = r_.pass && ok;
    }
    json& data() { return r_.data; }
    void csv(const std::string& title, const WeightModule& m) { r_.csv += "# " + title + "\n" + summary_csv(m); }

private:
    Report& r_;
};

// Runs `body`, turning an exception into a failed assertion.
void guarded(Run& run, const std::string& name, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        run.check(name, false, {{"error", e.what()}});
    }
}

double rel_err(const VecC& a, const VecC& b) {
    const double s = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    return (a - b).cwiseAbs().maxCoeff() / s;
}

VecC to_vecc(const MatQ& a, int col) { return to_double(a).col(col).cast<Cplx>(); }

// The same solution, re-transported from z so finite differences see short, consistent paths.
Solution rebased(const KZSystem& sys, const Solution& psi, const Point& z) {
    return transported_solution(sys, z, psi(z));
}

Point sample_point(Rng& rng, int sites) {
    // z_1 far to the right of z_2, …; all in Re > 0 so every principal branch is continuous.
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    Point z;
    for (int i = 0; i < sites; ++i) z.emplace_back(0.3 + 2.2 * (sites - 1 - i) + 0.5 + u(rng), u(rng));
    return z;
}

// ---------------------------------------------------------------- 1. scalar identity

void scalar_identity(const json& cfg, json& errors, Run* run, Rng& rng) {
    Params p(cfg, errors, "");
    const int samples = p.integer("samples", 200, 1, 100000);
    const int max_part = p.integer("max_part", 6, 0, 20);
    const int max_length = p.integer("max_length", 6, 0, 20);
    const int max_head = p.integer("max_head", 2, 0, 4);
    std::vector<std::string> types = kTypes;
    if (p.has("types")) {
        types.clear();
        if (!p.raw("types").is_array()) p.error("types must be an array");
        else
            for (const auto& t : p.raw("types")) {
                if (!t.is_string() || std::find(kTypes.begin(), kTypes.end(), t.get<std::string>()) == kTypes.end())
                    p.error("types: unknown type");
                else types.push_back(t.get<std::string>());
            }
    }
    if (!run) return;

    for (const auto& tn : types) {
        const XType x = parse_xtype(tn);
        int agree = 0;
        json first_bad;
        for (int s = 0; s < samples; ++s) {
            std::uniform_int_distribution<int> len(0, max_length), part(1, std::max(1, max_part)),
                head(0, max_head), hi(-6, 6);
            std::vector<int> parts;
            const int l = max_part == 0 ? 0 : len(rng);
            for (int i = 0; i < l; ++i) parts.push_back(part(rng));
            std::sort(parts.rbegin(), parts.rend());
            const int m = head(rng);
            DominantWeightSpec spec = spec_of(parts, rand_q(rng, 6, 5));
            for (int i = 0; i < m; ++i) spec.head.push_back(x == XType::BDot ? Rational(hi(rng)) : rand_q(rng, 6, 5));
            validate_spec(spec, x, m);
            int n = 1;
            for (Series se : {Series::Tilde, Series::Plain, Series::Bar}) n = std::max(n, minimal_rank(spec, se));
            bool ok = true;
            json vals = json::array();
            for (int nn : {n, n + 1}) {
                const Rational t = casimir_scalar(spec, Series::Tilde, x, m, nn);
                const Rational pl = casimir_scalar(spec, Series::Plain, x, m, nn);
                const Rational b = casimir_scalar(spec, Series::Bar, x, m, nn);
                ok = ok && t == pl && pl == b;
                vals.push_back({{"n", nn}, {"tilde", qs(t)}, {"plain", qs(pl)}, {"bar", qs(b)}});
            }
            if (ok) ++agree;
            else if (first_bad.is_null()) first_bad = {{"spec", to_json(spec)}, {"m", m}, {"values", vals}};
        }
        json detail = {{"samples", samples}, {"agree", agree}};
        if (!first_bad.is_null()) detail["first_mismatch"] = first_bad;
        run->check("type " + tn + ": tilde = plain = bar scalar on every spec", agree == samples, detail);
    }
}

// ---------------------------------------------------------------- 2. Casimir eigenvalue

std::vector<Inst> all_instances(const std::vector<std::pair<int, int>>& mn) {
    std::vector<Inst> out;
    for (auto [m, n] : mn)
        for (Series s : {Series::Tilde, Series::Plain, Series::Bar})
            for (const auto& t : kTypes) out.push_back({s, parse_xtype(t), m, n});
    return out;
}

std::vector<Inst> parse_instances(Params& p, std::vector<Inst> def) {
    if (!p.has("instances")) return def;
    if (!p.raw("instances").is_array()) {
        p.error("instances must be an array");
        return def;
    }
    std::vector<Inst> out;
    int i = 0;
    for (const auto& e : p.raw("instances")) {
        Params q(e, p.errors(), p.where("instances[" + std::to_string(i++) + "]"));
        out.push_back(parse_inst(q, Inst{}));
    }
    return out;
}

void casimir_eigenvalue(const json& cfg, json& errors, Run* run, Rng& rng) {
    Params p(cfg, errors, "");
    const int depth = p.integer("depth", 3, 0, 5);
    const bool ring = p.boolean("ring", true);
    const auto insts = parse_instances(p, all_instances({{0, 2}, {1, 1}, {1, 2}}));
    if (!run) return;

    int pairs = 0;
    for (const Inst& in : insts) {
        guarded(*run, label(in), [&] {
            auto g = build_algebra(in.s, in.x, in.m, in.n, true);
            const Weight w = random_weight(*g, rng);
            auto v = build_verma(g, w, depth);
            const Rational expect = casimir_scalar(w, rho_for(*g));
            int vectors = 0;
            bool ok = true;
            for (int b = 0; b < static_cast<int>(v->blocks.size()); ++b) {
                ok = ok && casimir_on_block(*v, b, true) == expect * identity(v->blocks[b].dim);
                vectors += v->blocks[b].dim;
            }
            ++pairs;
            json detail = {{"weight", w.str()}, {"scalar", qs(expect)}, {"vectors", vectors}, {"depth", depth}};
            if (ring) {
                auto gr = build_algebra(in.s, in.x, in.m, in.n, false);
                Weight w0 = w;
                w0.level = 0;
                auto vr = build_verma(gr, w0, depth);
                const Rational er = casimir_scalar(w0, rho_for(*gr));
                for (int b = 0; b < static_cast<int>(vr->blocks.size()); ++b)
                    ok = ok && casimir_on_block(*vr, b, false) == er * identity(vr->blocks[b].dim);
                detail["ring_scalar"] = qs(er);
            }
            run->check(label(in) + ": c acts by (λ+2ρ,λ) on every vector", ok, detail);
        });
    }
    run->data()["pairs"] = pairs;
}

// ---------------------------------------------------------------- 3. tensor identity for Ω

void oc_identity(const json& cfg, json& errors, Run* run, Rng& rng) {
    Params p(cfg, errors, "");
    const int depth = p.integer("depth", 2, 0, 4);
    std::vector<Inst> def = all_instances({{1, 1}});
    for (Series s : {Series::Tilde, Series::Plain, Series::Bar}) def.push_back({s, XType::A, 0, 2});
    const auto insts = parse_instances(p, def);
    if (!run) return;

    for (const Inst& in : insts) {
        guarded(*run, label(in), [&] {
            auto g = build_algebra(in.s, in.x, in.m, in.n, true);
            const Weight w1 = random_weight(*g, rng), w2 = random_weight(*g, rng);
            TensorModule t({build_verma(g, w1, depth), build_verma(g, w2, depth)}, depth);
            bool ok = true;
            int blocks = 0, dim = 0;
            for (const auto& c : t.all_coords()) {
                const MatQ lhs = omega_ij(t, 0, 1, c, true);
                const MatQ rhs =
                    (delta_casimir(t, c, true) - casimir_site(t, 0, c, true) - casimir_site(t, 1, c, true)) / 2;
                ok = ok && lhs == rhs;
                ++blocks;
                dim += t.block(c).dim;
            }
            // Top vector: Ω acts by ½[(λ¹+λ²+2ρ, λ¹+λ²) − (λ¹+2ρ,λ¹) − (λ²+2ρ,λ²)].
            const std::vector<int> top(g->rank(), 0);
            const Rational om = ell2_exponent(w1 + w2, w1, w2, rho_for(*g));
            ok = ok && omega_ij(t, 0, 1, top, true) == om * identity(1);
            run->check(label(in) + ": Ω = ½(Δc − c⊗1 − 1⊗c)", ok,
                       {{"blocks", blocks}, {"dimension", dim}, {"top_omega", qs(om)}});
        });
    }
}

// ---------------------------------------------------------------- 4. Gaudin structure

void gaudin_commute(const json& cfg, json& errors, Run* run, Rng& rng) {
    Params p(cfg, errors, "");
    const int depth = p.integer("depth", 2, 0, 3);
    const int sites = p.integer("sites", 3, 2, 4);
    std::vector<Rational> z = p.rationals("z", {0, 1, 3});
    if (static_cast<int>(z.size()) != sites) p.error("z must have one entry per site");
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j)
            if (z[i] == z[j]) p.error("z entries must be distinct");
    std::vector<Inst> def;
    for (Series s : {Series::Tilde, Series::Plain, Series::Bar}) {
        def.push_back({s, XType::A, 1, 2});
        def.push_back({s, XType::C, 1, 1});
    }
    const auto insts = parse_instances(p, def);
    if (!run) return;

    for (const Inst& in : insts) {
        guarded(*run, label(in), [&] {
            auto g = build_algebra(in.s, in.x, in.m, in.n, true);
            std::vector<ModulePtr> f;
            for (int i = 0; i < sites; ++i) f.push_back(build_verma(g, random_weight(*g, rng), depth));
            TensorModule t(f, depth);
            bool sym = true, delta_ok = true, hh = true, hdelta = true;
            int checked = 0, skipped = 0;
            std::map<std::vector<int>, std::vector<MatQ>> hcache;
            std::map<std::vector<int>, std::map<std::pair<int, int>, MatQ>> ocache;
            auto om = [&](const std::vector<int>& c, int i, int j) -> const MatQ& {
                auto& slot = ocache[c];
                auto it = slot.find({i, j});
                if (it == slot.end()) it = slot.emplace(std::make_pair(i, j), omega_ij(t, i, j, c, true)).first;
                return it->second;
            };
            auto ham = [&](const std::vector<int>& c) -> const std::vector<MatQ>& {
                auto it = hcache.find(c);
                if (it == hcache.end()) {
                    std::vector<MatQ> h;
                    for (int i = 0; i < sites; ++i) h.push_back(gaudin(t, i, z, c, true));
                    it = hcache.emplace(c, std::move(h)).first;
                }
                return it->second;
            };
            for (const auto& c : t.all_coords()) {
                for (int i = 0; i < sites; ++i)
                    for (int j = i + 1; j < sites; ++j) sym = sym && om(c, i, j) == om(c, j, i);
                const auto& h = ham(c);
                for (int i = 0; i < sites; ++i)
                    for (int j = i + 1; j < sites; ++j) hh = hh && is_zero(h[i] * h[j] - h[j] * h[i]);
                for (int b = 0; b < g->dim(); ++b) {
                    TensorAction a = t.delta_action(b, c);
                    if (a.lost) {
                        ++skipped;
                        continue;
                    }
                    if (a.zero) continue;
                    const MatQ d = to_dense(a.mat);
                    for (int i = 0; i < sites; ++i)
                        for (int j = i + 1; j < sites; ++j)
                            delta_ok = delta_ok && om(a.target, i, j) * d == d * om(c, i, j);
                    const auto& ht = ham(a.target);
                    for (int i = 0; i < sites; ++i) hdelta = hdelta && ht[i] * d == d * h[i];
                    ++checked;
                }
            }
            json detail = {{"blocks", t.all_coords().size()}, {"coproduct_actions", checked},
                           {"skipped_past_depth", skipped}};
            run->check(label(in) + ": Ω^(ij) = Ω^(ji)", sym, detail);
            run->check(label(in) + ": [Ω^(ij), Δ(b)] = 0 for every basis element b", delta_ok, detail);
            run->check(label(in) + ": [H^i, H^j] = 0", hh, detail);
            run->check(label(in) + ": [H^i, Δ(b)] = 0", hdelta, detail);
        });
    }
}

// ---------------------------------------------------------------- 5. two-point KZ

struct Target {
    Weight w;
    std::string name;
    std::optional<int> dim;
    std::optional<Rational> omega;
};

struct Ell2Case {
    Inst in;
    std::vector<DominantWeightSpec> factors;
    std::string kind;
    int depth = 4;
    Rational kappa = 2;
    std::vector<Target> targets;  // empty: every block
    Point za, zb;
};

std::vector<Target> parse_targets(Params& p, const Inst& in) {
    std::vector<Target> out;
    if (!p.has("targets")) return out;
    if (!p.raw("targets").is_array()) {
        p.error("targets must be an array");
        return out;
    }
    for (const auto& e : p.raw("targets")) {
        Target t;
        std::optional<Weight> w;
        if (e.contains("lambda_plus")) {
            auto s = parse_spec(e, p, "targets");
            if (s) w = resolve_spec(*s, in, p, "targets");
            if (s) t.name = "λ⁺=" + s->lambda_plus.str();
        } else if (e.contains("eps")) {
            w = parse_explicit_weight(e, p, "targets");
        } else {
            p.error("targets: each entry needs lambda_plus or eps");
        }
        if (!w) continue;
        t.w = *w;
        if (t.name.empty()) t.name = w->str();
        if (e.contains("expect_dim")) {
            if (e.at("expect_dim").is_number_integer()) t.dim = e.at("expect_dim").get<int>();
            else p.error("targets: expect_dim must be an integer");
        }
        if (e.contains("expect_omega")) t.omega = p.as_rational(e.at("expect_omega"), "targets.expect_omega");
        out.push_back(t);
    }
    return out;
}

std::vector<DominantWeightSpec> parse_factors(Params& p, const Inst& in, std::vector<DominantWeightSpec> def) {
    auto f = parse_specs(p, "factors", def);
    for (const auto& s : f) resolve_spec(s, in, p, "factors");
    return f;
}

json default_ell2_cases() {
    auto sp = [](std::vector<int> parts) { return json{{"lambda_plus", parts}}; };
    json gl2 = {{"series", "plain"}, {"type", "a"}, {"m", 0}, {"n", 2}, {"module", "irreducible"},
                {"factors", {sp({1}), sp({1})}},
                {"targets",
                 {{{"lambda_plus", {2}}, {"expect_dim", 1}, {"expect_omega", 1}},
                  {{"lambda_plus", {1, 1}}, {"expect_dim", 1}, {"expect_omega", -1}},
                  {{"eps", {{"2", 2}}}, {"expect_dim", 0}}}}};
    json tilde = {{"series", "tilde"}, {"type", "a"}, {"m", 0}, {"n", 1}, {"module", "parabolic"},
                  {"factors", {sp({1}), sp({1})}}};
    json bar = {{"series", "bar"}, {"type", "a"}, {"m", 0}, {"n", 2}, {"module", "parabolic"},
                {"factors", {sp({1}), sp({1})}}};
    json osp = {{"series", "plain"}, {"type", "c"}, {"m", 1}, {"n", 1}, {"module", "verma"}, {"depth", 2},
                {"factors", {{{"lambda_plus", {1}}, {"head", {0}}, {"d", "1/2"}}, {{"lambda_plus", {1}}, {"head", {0}}}}}};
    return json::array({gl2, tilde, bar, osp});
}

std::vector<Ell2Case> parse_ell2_cases(Params& p) {
    const json cases = p.has("cases") ? p.raw("cases") : default_ell2_cases();
    std::vector<Ell2Case> out;
    if (!cases.is_array()) {
        p.error("cases must be an array");
        return out;
    }
    int i = 0;
    for (const auto& e : cases) {
        Params q(e, p.errors(), p.where("cases[" + std::to_string(i++) + "]"));
        Ell2Case c;
        c.in = parse_inst(q, Inst{Series::Plain, XType::A, 0, 2});
        c.kind = q.choice("module", "parabolic", kKinds);
        c.depth = q.integer("depth", 4, 0, 8);
        c.kappa = q.rational("kappa", 2);
        if (c.kappa == 0) q.error("kappa must be nonzero");
        c.factors = parse_factors(q, c.in, {spec_of({1}), spec_of({1})});
        if (c.factors.size() != 2) q.error("exactly two factors are required");
        c.targets = parse_targets(q, c.in);
        c.za = q.point("z_start", {Cplx(1, 0), Cplx(0, 0)});
        c.zb = q.point("z_end", {Cplx(2, 0), Cplx(0, 0)});
        if (c.za.size() != 2 || c.zb.size() != 2) q.error("z_start and z_end need two points");
        out.push_back(std::move(c));
    }
    return out;
}

void kz_ell2(const json& cfg, json& errors, Run* run, Rng& rng) {
    Params p(cfg, errors, "");
    const double tol = p.real("transport_tolerance", 1e-8, 0, 1);
    auto cases = parse_ell2_cases(p);
    if (!run) return;

    json rows = json::array();
    for (const auto& c : cases) {
        const std::string name = label(c.in);
        guarded(*run, name, [&] {
            auto g = build_algebra(c.in.s, c.in.x, c.in.m, c.in.n, true);
            const Weight l1 = make_weight(c.factors[0], c.in.s, c.in.x, c.in.m, c.in.n);
            const Weight l2 = make_weight(c.factors[1], c.in.s, c.in.x, c.in.m, c.in.n);
            TensorModule t({make_module(g, l1, c.kind, c.depth), make_module(g, l2, c.kind, c.depth)}, c.depth);
            run->csv(name + " factor 1", *t.factors[0]);
            std::vector<Target> targets = c.targets;
            if (targets.empty())
                for (const auto& co : t.all_coords()) targets.push_back({t.block(co).weight, t.block(co).weight.str(), {}, {}});
            bool omega_ok = true, expect_ok = true, transport_ok = true, closed_ok = true;
            double worst_transport = 0, worst_residual = 0;
            int with_solutions = 0;
            for (const auto& tg : targets) {
                const TensorBlock* b = t.block_at(tg.w);
                MatQ s = b ? t.singular_vectors(b->coords) : MatQ(0, 0);
                const int dim = b ? static_cast<int>(s.cols()) : 0;
                json row = {{"instance", name}, {"mu", tg.w.str()}, {"dim", dim}};
                if (tg.dim) expect_ok = expect_ok && *tg.dim == dim;
                if (dim > 0) {
                    ++with_solutions;
                    auto sys = rational_system(t, b->coords, c.kappa, true);
                    auto om = scalar_action(sys.omega[0][1], s);
                    const Rational pred = ell2_exponent(tg.w, l1, l2, rho_for(*g));
                    omega_ok = omega_ok && om && *om == pred;
                    if (tg.omega) expect_ok = expect_ok && om && *om == *tg.omega;
                    row["omega_matrix"] = om ? qs(*om) : "not scalar";
                    row["omega_formula"] = qs(pred);
                    if (om) {
                        const VecC v = to_vecc(s, 0);
                        auto psi = ell2_solution(v, *om, c.kappa);
                        const VecC num = integrate(sys, {c.za, c.zb}, psi(c.za));
                        const double e = rel_err(num, psi(c.zb));
                        worst_transport = std::max(worst_transport, e);
                        transport_ok = transport_ok && e <= tol;
                        for (int k = 0; k < 3; ++k) {
                            const double r = residual(sys, psi, sample_point(rng, 2));
                            worst_residual = std::max(worst_residual, r);
                            closed_ok = closed_ok && r <= 1e-9;
                        }
                        row["transport_rel_error"] = e;
                    }
                }
                if (tg.omega) row["expected_omega"] = qs(*tg.omega);
                if (tg.dim) row["expected_dim"] = *tg.dim;
                rows.push_back(row);
            }
            run->check(name + ": Ω on singular vectors equals the two-point exponent formula", omega_ok,
                       {{"blocks_with_singular_vectors", with_solutions}});
            run->check(name + ": expected dimensions and exponents", expect_ok);
            run->check(name + ": transport reproduces the closed form", transport_ok,
                       {{"max_relative_error", worst_transport}, {"tolerance", tol}});
            run->check(name + ": closed form residual", closed_ok, {{"max_residual", worst_residual}});
        });
    }
    run->data()["spaces"] = rows;
}

// ---------------------------------------------------------------- 5b. transport

bool origin_in_triangle(Cplx a, Cplx b, Cplx c) {
    auto cross = [](Cplx u, Cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
    const double d1 = cross(b - a, -a), d2 = cross(c - b, -b), d3 = cross(a - c, -c);
    const bool neg = d1 < 0 || d2 < 0 || d3 < 0, pos = d1 > 0 || d2 > 0 || d3 > 0;
    return !(neg && pos);
}

// The triangle spanned by the two paths a→b and a→mid→b avoids every pole hyperplane.
bool homotopic(const Point& a, const Point& mid, const Point& b, bool trig) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if (origin_in_triangle(a[i] - a[j], mid[i] - mid[j], b[i] - b[j])) return false;
        if (trig && origin_in_triangle(a[i], mid[i], b[i])) return false;
    }
    return true;
}

void kz_transport(const json& cfg, json& errors, Run* run, Rng& rng) {
    Params p(cfg, errors, "");
    const double tol = p.real("flatness_tolerance", 1e-7, 0, 1);
    const Rational kappa = p.rational("kappa", 2);
    if (kappa == 0) p.error("kappa must be nonzero");
    const Point za = p.point("z_start", {Cplx(0, 0), Cplx(1, 0), Cplx(3, 0)});
    const Point zm = p.point("z_detour", {Cplx(0.2, 1.1), Cplx(1.8, -0.6), Cplx(3.4, 0.9)});
    const Point zb = p.point("z_end", {Cplx(0.5, 0.4), Cplx(2.2, 0.3), Cplx(4.1, -0.2)});
    if (za.size() != zm.size() || za.size() != zb.size() || za.size() < 2) p.error("paths need matching points");
    else if (!homotopic(za, zm, zb, false)) p.error("the two paths are not homotopic in the configuration space");
    std::vector<Inst> def = {{Series::Plain, XType::A, 0, 2}, {Series::Tilde, XType::A, 0, 1}};
    const auto insts = parse_instances(p, def);
    const int depth = p.integer("depth", 3, 0, 6);
    if (!run) return;

    const int sites = static_cast<int>(za.size());
    for (const Inst& in : insts) {
        const std::string name = label(in);
        guarded(*run, name, [&] {
            auto g = build_algebra(in.s, in.x, in.m, in.n, true);
            const Weight l = make_weight(spec_of({1}), in.s, in.x, in.m, in.n);
            auto v = parabolic_verma(g, l, depth);
            TensorModule t(std::vector<ModulePtr>(sites, v), depth);
            // Largest block within depth.
            std::vector<int> best;
            int bd = -1;
            for (const auto& c : t.all_coords())
                if (t.block(c).dim > bd) {
                    bd = t.block(c).dim;
                    best = c;
                }
            auto sys = rational_system(t, best, kappa, true);
            std::normal_distribution<double> nd;
            VecC psi0(sys.dim);
            for (int k = 0; k < sys.dim; ++k) psi0(k) = Cplx(nd(rng), nd(rng));
            const VecC a = integrate(sys, {za, zb}, psi0);
            const VecC b = integrate(sys, {za, zm, zb}, psi0);
            const double e = rel_err(b, a);
            run->check(name + ": transport along homotopic paths agrees", e <= tol,
                       {{"block", t.block(best).weight.str()}, {"dim", sys.dim}, {"relative_difference", e},
                        {"tolerance", tol}});
            const VecC zero = integrate(sys, {za, zm, zb}, VecC::Zero(sys.dim));
            run->check(name + ": zero initial vector transports to zero", zero.cwiseAbs().maxCoeff() == 0);
            auto sol = transported_solution(sys, za, psi0);
            const double r = residual(sys, rebased(sys, sol, zb), zb);
            run->check(name + ": transported solution residual", r <= 1e-8, {{"residual", r}});
            bool caught = false;
            Point through = za;
            through[1] = za[0];
            try {
                integrate(sys, {zb, through}, psi0);
            } catch (const PoleProximity&) {
                caught = true;
            }
            run->check(name + ": paths through a pole are rejected", caught);
        });
    }
}

// ---------------------------------------------------------------- 6. truncation

struct TruncCase {
    Inst in;
    int k = 2;
    int depth = 3;
    std::vector<DominantWeightSpec> factors;
    DominantWeightSpec outside;
    bool has_outside = false;
};

json default_trunc_cases() {
    json out = json::array();
    // Highest weights just outside the rank-k lattice, per series and k.
    const std::map<std::pair<std::string, int>, std::vector<int>> outside = {
        {{"plain", 2}, {1, 1, 1}}, {{"plain", 1}, {1, 1}}, {{"tilde", 2}, {3, 3, 3}},
        {{"tilde", 1}, {2, 2}},    {{"bar", 2}, {3}},       {{"bar", 1}, {2}}};
    for (const char* s : {"plain", "tilde", "bar"})
        for (int k : {2, 1})
            out.push_back({{"series", s}, {"type", "a"}, {"m", 0}, {"n", 3}, {"k", k}, {"depth", 3},
                           {"factors", {{{"lambda_plus", {1}}, {"d", "1/2"}}, {{"lambda_plus", {1}}, {"d", "1/3"}}}},
                           {"outside", {{"lambda_plus", outside.at({s, k})}}}});
    out.push_back({{"series", "plain"}, {"type", "c"}, {"m", 1}, {"n", 3}, {"k", 2}, {"depth", 2},
                   {"factors", {{{"lambda_plus", {1}}, {"head", {0}}}, {{"lambda_plus", {1}}, {"head", {0}}}}},
                   {"outside", {{"lambda_plus", {1, 1, 1}}, {"head", {0}}}}});
    return out;
}

void truncation_stability(const json& cfg, json& errors, Run* run, Rng& rng) {
    Params p(cfg, errors, "");
    const Rational kappa = p.rational("kappa", Rational(5, 2));
    if (kappa == 0) p.error("kappa must be nonzero");
    const json cases = p.has("cases") ? p.raw("cases") : default_trunc_cases();
    std::vector<TruncCase> tc;
    if (!cases.is_array()) p.error("cases must be an array");
    else {
        int i = 0;
        for (const auto& e : cases) {
            Params q(e, p.errors(), p.where("cases[" + std::to_string(i++) + "]"));
            TruncCase c;
            c.in = parse_inst(q, Inst{Series::Plain, XType::A, 0, 3});
            c.k = q.integer("k", 2, 1, 6);
            if (c.k >= c.in.n) q.error("k must be smaller than n");
            c.depth = q.integer("depth", 3, 0, 5);
            c.factors = parse_factors(q, c.in, {spec_of({1}), spec_of({1})});
            if (c.factors.size() != 2) q.error("exactly two factors are required");
            if (q.has("outside")) {
                auto s = parse_spec(q.raw("outside"), q, "outside");
                if (s) {
                    c.outside = *s;
                    c.has_outside = true;
                    resolve_spec(c.outside, c.in, q, "outside");
                }
            }
            tc.push_back(c);
        }
    }
    if (!run) return;

    for (const auto& c : tc) {
        const std::string name = label(c.in) + " -> k=" + std::to_string(c.k);
        guarded(*run, name, [&] {
            const Inst& in = c.in;
            auto gn = build_algebra(in.s, in.x, in.m, in.n, true);
            auto gk = build_algebra(in.s, in.x, in.m, c.k, true);
            // Modules
            bool modules_ok = true;
            json mods = json::array();
            std::vector<ModulePtr> pn, pk;
            for (const auto& spec : c.factors) {
                const Weight wn = make_weight(spec, in.s, in.x, in.m, in.n);
                const Weight wk = make_weight(spec, in.s, in.x, in.m, c.k);
                auto vn = build_verma(gn, wn, c.depth);
                auto vk = build_verma(gk, wk, c.depth);
                auto parn = parabolic_verma(gn, wn, c.depth);
                auto park = parabolic_verma(gk, wk, c.depth);
                std::string w1, w2, w3;
                const bool a = same_module(*truncate(vn, gk), *vk, &w1);
                const bool b = same_module(*truncate(parn, gk), *park, &w2);
                const bool d = same_module(*truncate(irreducible_quotient(parn), gk), *irreducible_quotient(park), &w3);
                modules_ok = modules_ok && a && b && d;
                mods.push_back({{"spec", to_json(spec)}, {"verma", a ? "match" : w1}, {"parabolic", b ? "match" : w2},
                                {"irreducible", d ? "match" : w3}});
                pn.push_back(parn);
                pk.push_back(park);
            }
            run->check(name + ": truncated Verma, parabolic and irreducible modules match rank-k constructions",
                       modules_ok, {{"modules", mods}});
            if (c.has_outside) {
                const Weight wo = make_weight(c.outside, in.s, in.x, in.m, in.n);
                const bool in_xi = weight_in_Xi(wo, in.s, in.x, in.m, c.k);
                if (in_xi) throw std::invalid_argument("outside weight lies in the rank-k lattice");
                auto tr = truncate(parabolic_verma(gn, wo, c.depth), gk);
                run->check(name + ": highest weight outside the rank-k lattice truncates to zero",
                           !in_xi && tr->total_dim() == 0, {{"weight", wo.str()}});
            }

            TensorModule tn(pn, c.depth);
            std::vector<ModulePtr> trf = {truncate(pn[0], gk), truncate(pn[1], gk)};
            const int dk = std::min(trf[0]->depth, trf[1]->depth);
            TensorModule tk(trf, dk), tind(pk, dk);
            const TrigKernels kn = trig_kernels(*gn, true), kk = trig_kernels(*gk, true);
            bool alg_ok = true, indep_ok = true, sing_ok = true, coeff_ok = true;
            double worst = 0, worst_trig = 0, worst_closed = 0;
            int blocks = 0;
            const std::vector<Rational> zq = {Rational(3), Rational(-1, 2)};
            for (const auto& ck : tk.all_coords()) {
                const TensorBlock& bk = tk.block(ck);
                const TensorBlock* bn = tn.block_at(bk.weight);
                if (!bn) throw std::runtime_error("block missing at rank n: " + bk.weight.str());
                const MatQ P = block_embedding(tk, ck, tn, bn->coords);
                if (P.rows() != P.cols()) throw std::runtime_error("weight space grew under truncation");
                ++blocks;
                const MatQ on = omega_ij(tn, 0, 1, bn->coords, true), ok = omega_ij(tk, 0, 1, ck, true);
                alg_ok = alg_ok && on * P == P * ok;
                alg_ok = alg_ok && apply_bilinear(tn, kn.plus, 0, 1, bn->coords) * P ==
                                       P * apply_bilinear(tk, kk.plus, 0, 1, ck);
                alg_ok = alg_ok && apply_bilinear(tn, kn.minus, 0, 1, bn->coords) * P ==
                                       P * apply_bilinear(tk, kk.minus, 0, 1, ck);
                const TensorBlock* bi = tind.block_at(bk.weight);
                indep_ok = indep_ok && bi && omega_ij(tind, 0, 1, bi->coords, true) == ok;

                const MatQ sn = tn.singular_vectors(bn->coords), sk = tk.singular_vectors(ck);
                const MatQ rs = P.transpose() * sn;
                sing_ok = sing_ok && sn.cols() == sk.cols() && (sk.cols() == 0 || same_span(rs, sk));

                const auto hn = h_shift(tn, bn->coords, bk.weight, Rational(1, 2), true, true);
                const auto hk = h_shift(tk, ck, bk.weight, Rational(1, 2), true, true);
                auto rn = rational_system(tn, bn->coords, kappa, true), rk = rational_system(tk, ck, kappa, true);
                auto trn = trig_system(tn, bn->coords, kappa, true, hn), trk = trig_system(tk, ck, kappa, true, hk);
                for (int i = 0; i < 2; ++i) {
                    coeff_ok = coeff_ok && rn.coefficient(i, zq) * P == P * rk.coefficient(i, zq);
                    coeff_ok = coeff_ok && trn.coefficient(i, zq) * P == P * trk.coefficient(i, zq);
                }
                // Transported solutions restrict to solutions.
                std::normal_distribution<double> nd;
                VecC psi0(rn.dim);
                for (int k = 0; k < rn.dim; ++k) psi0(k) = Cplx(nd(rng), nd(rng));
                const Eigen::MatrixXcd pt = to_double(MatQ(P.transpose())).cast<Cplx>();
                const Point base = sample_point(rng, 2);
                for (auto* pair : {&rn, &trn}) {
                    const KZSystem& sn_sys = *pair;
                    const KZSystem& sk_sys = pair == &rn ? rk : trk;
                    auto big = transported_solution(sn_sys, base, psi0);
                    for (int k = 0; k < 2; ++k) {
                        const Point z = sample_point(rng, 2);
                        auto local = rebased(sn_sys, big, z);
                        Solution small = [&, local](const Point& w) -> VecC { return pt * local(w); };
                        const double r = residual(sk_sys, small, z);
                        (pair == &rn ? worst : worst_trig) = std::max(pair == &rn ? worst : worst_trig, r);
                    }
                    if (sn.cols() > 0 && pair == &rn) {
                        auto om = scalar_action(rn.omega[0][1], sn);
                        if (!om) sing_ok = false;
                        else {
                            auto closed = ell2_solution(to_vecc(sn, 0), *om, kappa);
                            Solution restricted = [&, closed](const Point& z) -> VecC { return pt * closed(z); };
                            worst_closed = std::max(worst_closed, residual(rk, restricted, sample_point(rng, 2)));
                        }
                    }
                }
            }
            json detail = {{"blocks", blocks}};
            run->check(name + ": Ω, Ω₊, Ω₋ commute with the truncation embedding (exact)", alg_ok, detail);
            run->check(name + ": truncated tensor equals the rank-k tensor", indep_ok, detail);
            run->check(name + ": singular vectors restrict to singular vectors", sing_ok, detail);
            run->check(name + ": rational and trigonometric coefficients restrict (exact)", coeff_ok, detail);
            const double all = std::max({worst, worst_trig, worst_closed});
            run->check(name + ": restricted solutions solve the rank-k systems", all <= 1e-9,
                       {{"rational_transported", worst}, {"trigonometric_transported", worst_trig},
                        {"rational_closed_form", worst_closed}});
        });
    }
}

// ---------------------------------------------------------------- 7. super duality

struct DualTarget {
    DominantWeightSpec spec;
    Weight wt, wp, wb;
    std::vector<int> ct, cp, cb;
    MatQ st, sp, sb, spi, sbi;
    TransferMaps y, yb;
    std::vector<int> cy, cyb;
    MatQ ymat, ybmat;  // Δ(Y) on the whole λ̃ block
    MatQ p, pb;        // T-tensor block inside the tilde tensor block
};

struct DualSetup {
    XType x = XType::A;
    int m = 0, n = 1;
    std::vector<DominantWeightSpec> factors;
    AlgebraPtr gt, gp, gb;
    int dt = 0, dp = 0, db = 0;
    std::vector<Weight> lt, lp, lb;
    std::vector<ModulePtr> pt, tp, tb, pp, pb;
    std::unique_ptr<TensorModule> tt, tpT, tbT, tpi, tbi;
    std::vector<DualTarget> targets;
    json certificates = json::array();
};

int minimal_rank_all(const std::vector<DominantWeightSpec>& specs) {
    int n = 1;
    for (const auto& s : specs)
        for (Series se : {Series::Tilde, Series::Plain, Series::Bar}) n = std::max(n, minimal_rank(s, se));
    return n;
}

std::unique_ptr<DualSetup> build_duality(XType x, int m, const std::vector<DominantWeightSpec>& factors,
                                         const std::vector<DominantWeightSpec>& targets) {
    auto d = std::make_unique<DualSetup>();
    d->x = x;
    d->m = m;
    d->factors = factors;
    std::vector<DominantWeightSpec> all = factors;
    all.insert(all.end(), targets.begin(), targets.end());
    d->n = minimal_rank_all(all);
    const int n = d->n;
    d->gt = build_algebra(Series::Tilde, x, m, n, true);
    d->gp = build_algebra(Series::Plain, x, m, n, true);
    d->gb = build_algebra(Series::Bar, x, m, n, true);
    Weight ht, hp, hb;
    std::vector<int> d0, d0b;
    for (const auto& s : factors) {
        d->lt.push_back(make_weight(s, Series::Tilde, x, m, n));
        d->lp.push_back(make_weight(s, Series::Plain, x, m, n));
        d->lb.push_back(make_weight(s, Series::Bar, x, m, n));
        ht = ht + d->lt.back();
        hp = hp + d->lp.back();
        hb = hb + d->lb.back();
        d0.push_back(depth_below(*d->gt, d->lt.back(), d->lp.back()));
        d0b.push_back(depth_below(*d->gt, d->lt.back(), d->lb.back()));
    }
    int dt = 0, need_p = 0, need_b = 0;
    for (const auto& s : targets) {
        const Weight wt = make_weight(s, Series::Tilde, x, m, n), wp = make_weight(s, Series::Plain, x, m, n),
                     wb = make_weight(s, Series::Bar, x, m, n);
        const int pd = depth_below(*d->gp, hp, wp), bd = depth_below(*d->gb, hb, wb);
        need_p = std::max(need_p, pd);
        need_b = std::max(need_b, bd);
        int s0 = 0, s0b = 0;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            s0 += d0[i];
            s0b += d0b[i];
        }
        dt = std::max({dt, depth_below(*d->gt, ht, wt), depth_below(*d->gt, ht, wp), depth_below(*d->gt, ht, wb),
                       s0 + 2 * pd, s0b + 2 * bd});
    }
    d->dt = dt;
    for (const auto& w : d->lt) d->pt.push_back(parabolic_verma(d->gt, w, dt));
    d->tt = std::make_unique<TensorModule>(d->pt, dt);
    // Each plain (bar) simple root is a sum of at least two tilde simple roots below the head.
    int cap = dt, capb = dt;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        cap = std::min(cap, (dt - d0[i]) / 2);
        capb = std::min(capb, (dt - d0b[i]) / 2);
    }
    if (cap < need_p || capb < need_b) throw std::runtime_error("build_duality: depth bound too small");
    d->dp = cap;
    d->db = capb;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        d->tp.push_back(functor_T(d->pt[i], d->gp, cap));
        d->tb.push_back(functor_T(d->pt[i], d->gb, capb));
        d->pp.push_back(parabolic_verma(d->gp, d->lp[i], cap));
        d->pb.push_back(parabolic_verma(d->gb, d->lb[i], capb));
    }
    d->tpT = std::make_unique<TensorModule>(d->tp, cap);
    d->tbT = std::make_unique<TensorModule>(d->tb, capb);
    d->tpi = std::make_unique<TensorModule>(d->pp, cap);
    d->tbi = std::make_unique<TensorModule>(d->pb, capb);

    for (const auto& s : targets) {
        DualTarget t;
        t.spec = s;
        t.wt = make_weight(s, Series::Tilde, x, m, n);
        t.wp = make_weight(s, Series::Plain, x, m, n);
        t.wb = make_weight(s, Series::Bar, x, m, n);
        auto need = [](const TensorBlock* b, const Weight& w) {
            if (!b) throw std::runtime_error("build_duality: block missing at " + w.str());
            return b->coords;
        };
        t.ct = need(d->tt->block_at(t.wt), t.wt);
        t.cp = need(d->tpT->block_at(t.wp), t.wp);
        t.cb = need(d->tbT->block_at(t.wb), t.wb);
        t.st = d->tt->singular_vectors(t.ct);
        t.sp = d->tpT->singular_vectors(t.cp);
        t.sb = d->tbT->singular_vectors(t.cb);
        t.spi = d->tpi->singular_vectors(need(d->tpi->block_at(t.wp), t.wp));
        t.sbi = d->tbi->singular_vectors(need(d->tbi->block_at(t.wb), t.wb));
        const int deg = std::max(1, s.lambda_plus.size());
        const int dy = depth_below(*d->gt, t.wt, t.wp), dyb = depth_below(*d->gt, t.wt, t.wb);
        t.y = transfer_maps(*parabolic_verma(d->gt, t.wt, dy), t.wp, deg);
        t.yb = transfer_maps(*parabolic_verma(d->gt, t.wt, dyb), t.wb, deg);
        const int dim = d->tt->block(t.ct).dim;
        std::tie(t.cy, t.ymat) = d->tt->apply_word(t.y.y, t.ct, identity(dim));
        std::tie(t.cyb, t.ybmat) = d->tt->apply_word(t.yb.y, t.ct, identity(dim));
        t.p = block_embedding(*d->tpT, t.cp, *d->tt, t.cy);
        t.pb = block_embedding(*d->tbT, t.cb, *d->tt, t.cyb);
        d->targets.push_back(std::move(t));
    }
    return d;
}

struct DualCase {
    std::vector<DominantWeightSpec> factors, targets;
};

std::vector<DualCase> parse_dual_cases(Params& p, XType x, int m) {
    std::vector<DualCase> out;
    if (!p.has("cases")) {
        out.push_back({{spec_of({1}), spec_of({1})}, {spec_of({2}), spec_of({1, 1})}});
        out.push_back({{spec_of({2}), spec_of({1})}, {spec_of({3}), spec_of({2, 1})}});
        out.push_back({{spec_of({1, 1}), spec_of({1})}, {spec_of({2, 1})}});
        return out;
    }
    if (!p.raw("cases").is_array()) {
        p.error("cases must be an array");
        return out;
    }
    int i = 0;
    for (const auto& e : p.raw("cases")) {
        Params q(e, p.errors(), p.where("cases[" + std::to_string(i++) + "]"));
        DualCase c;
        c.factors = parse_specs(q, "factors", {});
        c.targets = parse_specs(q, "targets", {});
        if (c.factors.size() < 2) q.error("at least two factors are required");
        if (c.targets.empty()) q.error("targets must be nonempty");
        for (auto* v : {&c.factors, &c.targets})
            for (auto& s : *v) {
                if (static_cast<int>(s.head.size()) != m) s.head.resize(m, Rational(0));
                try {
                    validate_spec(s, x, m);
                } catch (const std::exception& ex) {
                    q.error(ex.what());
                }
            }
        out.push_back(std::move(c));
    }
    return out;
}

std::string case_name(const DualCase& c) {
    std::string s;
    for (std::size_t i = 0; i < c.factors.size(); ++i) s += (i ? "⊗" : "") + c.factors[i].lambda_plus.str();
    return s;
}

void superduality_bijection(const json& cfg, json& errors, Run* run, Rng&) {
    Params p(cfg, errors, "");
    const XType x = parse_xtype(p.choice("type", "a", {"a"}));
    const int m = p.integer("m", 0, 0, 0);
    const auto cases = parse_dual_cases(p, x, m);
    if (!run) return;

    json rows = json::array();
    for (const auto& c : cases) {
        const std::string cn = case_name(c);
        guarded(*run, cn, [&] {
            auto d = build_duality(x, m, c.factors, c.targets);
            bool iso = true;
            json certs = json::array();
            for (std::size_t i = 0; i < c.factors.size(); ++i) {
                std::string w1, w2;
                const bool a = certify_isomorphism(*d->pp[i], *d->tp[i], d->dp, &w1);
                const bool b = certify_isomorphism(*d->pb[i], *d->tb[i], d->db, &w2);
                iso = iso && a && b;
                certs.push_back({{"factor", c.factors[i].lambda_plus.str()}, {"T", a ? "isomorphic" : w1},
                                 {"Tbar", b ? "isomorphic" : w2}});
            }
            run->check(cn + ": T and T̄ of tilde parabolic Verma modules are the plain and bar ones", iso,
                       {{"certificates", certs}, {"tilde_depth", d->dt}});
            for (const auto& t : d->targets) {
                const std::string name = cn + " → " + t.spec.lambda_plus.str();
                const int dt = t.st.cols(), dp = t.sp.cols(), db = t.sb.cols();
                run->check(name + ": dim S̃ = dim S = dim S̄", dt == dp && dp == db && dp == t.spi.cols() &&
                                                                 db == t.sbi.cols(),
                           {{"tilde", dt}, {"plain_T", dp}, {"bar_T", db}, {"plain", t.spi.cols()},
                            {"bar", t.sbi.cols()}});
                // Y and X on the singular subspaces.
                auto side = [&](const TransferMaps& tm, const std::vector<int>& cy, const MatQ& ymat, const MatQ& P,
                                const MatQ& s, const char* tag) {
                    const MatQ ys = ymat * t.st;
                    const MatQ ps = P * s;
                    bool ok = rank(ys) == dt && (dt == 0 || same_span(ys, ps));
                    if (dt > 0) {
                        auto [cx, xy] = d->tt->apply_word(tm.x, cy, ys);
                        ok = ok && cx == t.ct && xy == tm.scale * t.st;
                        auto [c2, xps] = d->tt->apply_word(tm.x, cy, ps);
                        auto [c3, yxps] = d->tt->apply_word(tm.y, c2, xps);
                        ok = ok && c3 == cy && yxps == tm.scale * ps;
                    }
                    run->check(name + ": " + tag + " maps S̃ onto the singular space and X inverts it", ok,
                               {{"Y_length", tm.y.size()}, {"X_length", tm.x.size()}, {"scale", qs(tm.scale)}});
                };
                side(t.y, t.cy, t.ymat, t.p, t.sp, "Y");
                side(t.yb, t.cyb, t.ybmat, t.pb, t.sb, "Ȳ");
                // Ω is compatible with the projections; exponents agree.
                const MatQ omt = omega_ij(*d->tt, 0, 1, t.cy, true);
                const MatQ omp = omega_ij(*d->tpT, 0, 1, t.cp, true);
                const MatQ omtb = omega_ij(*d->tt, 0, 1, t.cyb, true);
                const MatQ omb = omega_ij(*d->tbT, 0, 1, t.cb, true);
                bool compat = omt * t.p == t.p * omp && omtb * t.pb == t.pb * omb;
                json ex = json::object();
                if (d->factors.size() == 2 && dt > 0) {
                    auto a = scalar_action(omega_ij(*d->tt, 0, 1, t.ct, true), t.st);
                    auto b = scalar_action(omp, t.sp);
                    auto e = scalar_action(omb, t.sb);
                    compat = compat && a && b && e && *a == *b && *b == *e;
                    ex = {{"tilde", a ? qs(*a) : "-"}, {"plain", b ? qs(*b) : "-"}, {"bar", e ? qs(*e) : "-"}};
                }
                run->check(name + ": Ω commutes with the projections and exponents agree", compat, ex);
                // k₀ and the rank-k₀ plain instance.
                const int k0 = compute_k0(t.wb);
                json kd = {{"k0", k0}, {"bar_dim", db}};
                bool kok = true;
                for (int k : {k0, k0 + 1}) {
                    auto gk = build_algebra(Series::Plain, x, m, k, true);
                    std::vector<ModulePtr> f;
                    Weight hk;
                    for (const auto& s : c.factors) hk = hk + make_weight(s, Series::Plain, x, m, k);
                    const Weight wk = make_weight(t.spec, Series::Plain, x, m, k);
                    const int dk = depth_below(*gk, hk, wk);
                    for (const auto& s : c.factors) f.push_back(parabolic_verma(gk, make_weight(s, Series::Plain, x, m, k), dk));
                    TensorModule tk(f, dk);
                    const int dim = tk.singular_vectors(tk.block_at(wk)->coords).cols();
                    kd["plain_dim_rank_" + std::to_string(k)] = dim;
                    kok = kok && dim == db;
                }
                run->check(name + ": rank-k₀ plain instance matches the bar instance", kok, kd);
                rows.push_back({{"case", cn}, {"target", t.spec.lambda_plus.str()}, {"rank", d->n},
                                {"dims", {dt, dp, db}}, {"k0", k0}});
            }
        });
    }
    run->data()["spaces"] = rows;
}

// ---------------------------------------------------------------- 8. central extension

void central_ext_correction(const json& cfg, json& errors, Run* run, Rng& rng) {
    Params p(cfg, errors, "");
    const Rational kappa = p.rational("kappa", Rational(3, 2));
    if (kappa == 0) p.error("kappa must be nonzero");
    const auto d = p.rationals("levels", {Rational(1, 2), Rational(1, 3)});
    if (d.size() != 2) p.error("levels must have two entries");
    const int n = p.integer("n", 2, 1, 4);
    const int depth = p.integer("depth", 3, 0, 5);
    const int samples = p.integer("samples", 20, 1, 200);
    const auto zr = p.rationals("z_exact", {Rational(3), Rational(-1, 2)});
    if (zr.size() != 2 || zr[0] == zr[1] || zr[0] == 0 || zr[1] == 0) p.error("z_exact must be two distinct nonzero values");
    std::vector<Series> series;
    for (const auto& s : kSeries) series.push_back(parse_series(s));
    if (!run) return;

    for (Series s : series) {
        const std::string name = to_string(s) + " a (n=" + std::to_string(n) + ")";
        guarded(*run, name, [&] {
            auto ge = build_algebra(s, XType::A, 0, n, true);
            auto gr = build_algebra(s, XType::A, 0, n, false);
            std::vector<ModulePtr> fe, fr;
            for (int i = 0; i < 2; ++i) {
                const DominantWeightSpec sp = spec_of({1}, d[i]);
                const Weight we = make_weight(sp, s, XType::A, 0, n);
                fe.push_back(parabolic_verma(ge, we, depth));
                // Same vector space: the highest weight vector keeps its parity.
                fr.push_back(parabolic_verma(gr, ring_weight(sp, s, XType::A, 0, n), depth, std::nullopt,
                                             default_hw_parity(we, XType::A)));
            }
            // The two module families share bases; root vectors act identically.
            bool roots_ok = true;
            for (int i = 0; i < 2; ++i) {
                roots_ok = roots_ok && fe[i]->blocks.size() == fr[i]->blocks.size();
                for (int r = 0; roots_ok && r < ge->num_roots(); ++r)
                    for (int e : {ge->roots[r].raising, ge->roots[r].lowering})
                        for (std::size_t b = 0; b < fe[i]->blocks.size(); ++b) {
                            const auto &x = fe[i]->act(e, b), &y = fr[i]->act(e, b);
                            roots_ok = roots_ok && x.target == y.target && x.lost == y.lost &&
                                       (x.target < 0 || x.lost || equal(x.mat, y.mat));
                        }
            }
            run->check(name + ": ring and extended modules share root vector matrices", roots_ok);

            TensorModule te(fe, depth), tr(fr, depth);
            const int sign = s == Series::Plain ? 1 : s == Series::Bar ? -1 : 0;
            const Rational shift = sign * n * d[0] * d[1];
            const Rational rshift = shift * (zr[0] + zr[1]) / (2 * (zr[0] - zr[1]));
            bool om_ok = true, r_ok = true;
            for (const auto& c : te.all_coords()) {
                const int dim = te.block(c).dim;
                om_ok = om_ok && omega_ij(tr, 0, 1, c, false) == omega_ij(te, 0, 1, c, true) + shift * identity(dim);
                r_ok = r_ok && trig_r(tr, 0, 1, zr[0], zr[1], c, false) ==
                                   trig_r(te, 0, 1, zr[0], zr[1], c, true) + rshift * identity(dim);
            }
            run->check(name + ": ring Ω = Ω + (" + qs(shift) + ")·1 on every block", om_ok);
            run->check(name + ": ring R(z) = R(z) + n d₁d₂(z_i+z_j)/(2(z_i−z_j))·sign on every block", r_ok,
                       {{"z", {qs(zr[0]), qs(zr[1])}}, {"shift", qs(rshift)}});

            double worst_r = 0, worst_t = 0;
            int spaces = 0;
            for (const auto& c : tr.all_coords()) {
                const MatQ sing = tr.singular_vectors(c);
                if (sing.cols() == 0) continue;
                ++spaces;
                auto rs = rational_system(tr, c, kappa, false), es = rational_system(te, c, kappa, true);
                auto om = scalar_action(rs.omega[0][1], sing);
                if (!om) throw std::runtime_error("ring Ω not scalar on singular vectors");
                const VecC v = to_vecc(sing, 0);
                auto ring = ell2_solution(v, *om, kappa);
                Solution corr = [=](const Point& z) -> VecC {
                    return correction_factor(s, n, d, kappa, z, false) * ring(z);
                };
                const auto h = h_shift(tr, c, tr.block(c).weight, Rational(1, 2), true, false);
                auto rt = trig_system(tr, c, kappa, false, h), et = trig_system(te, c, kappa, true, h);
                const Point base = {Cplx(2.5, 0), Cplx(0.55, 0)};
                auto ring_t = transported_solution(rt, base, v);
                std::uniform_real_distribution<double> u(-0.5, 0.5);
                for (int k = 0; k < samples; ++k) {
                    const Point z = {Cplx(2.5 + u(rng), u(rng)), Cplx(0.55 + 0.5 * u(rng), u(rng))};
                    worst_r = std::max(worst_r, residual(es, corr, z));
                    auto local = rebased(rt, ring_t, z);
                    Solution corr_t = [=](const Point& w) -> VecC {
                        return correction_factor(s, n, d, kappa, w, true) * local(w);
                    };
                    worst_t = std::max(worst_t, residual(et, corr_t, z));
                }
            }
            run->check(name + ": corrected ring solutions solve the extended rational system", worst_r <= 1e-9,
                       {{"max_residual", worst_r}, {"singular_spaces", spaces}, {"samples", samples}});
            run->check(name + ": corrected ring solutions solve the extended trigonometric system", worst_t <= 1e-9,
                       {{"max_residual", worst_t}, {"singular_spaces", spaces}, {"samples", samples}});
        });
    }
}

// ---------------------------------------------------------------- 9. trigonometric suite

void trig_suite(const json& cfg, json& errors, Run* run, Rng& rng) {
    Params p(cfg, errors, "");
    const Rational kappa = p.rational("kappa", Rational(5, 2));
    if (kappa == 0) p.error("kappa must be nonzero");
    const json cases = p.has("lemma_cases") ? p.raw("lemma_cases") : default_ell2_cases();
    const json wrapped = {{"cases", cases}};
    Params lq(wrapped, p.errors(), "lemma_cases");
    const auto lemma = parse_ell2_cases(lq);
    const auto dual = parse_dual_cases(p, XType::A, 0);
    if (!run) return;

    // Reduction identity on singular vectors.
    int lemma_instances = 0;
    for (const auto& c : lemma) {
        const std::string name = label(c.in);
        guarded(*run, name, [&] {
            auto g = build_algebra(c.in.s, c.in.x, c.in.m, c.in.n, true);
            std::vector<ModulePtr> f;
            for (const auto& s : c.factors)
                f.push_back(make_module(g, make_weight(s, c.in.s, c.in.x, c.in.m, c.in.n), c.kind, c.depth));
            TensorModule t(f, c.depth);
            bool sing_ok = true, full = true;
            int spaces = 0;
            for (const auto& co : t.all_coords()) {
                const MatQ s = t.singular_vectors(co);
                for (int i = 0; i < t.sites(); ++i) {
                    auto [l, r] = trig_reduction_sides(t, i, co, true);
                    full = full && l == r;
                    if (s.cols() > 0) sing_ok = sing_ok && l * s == r * s;
                }
                if (s.cols() > 0) ++spaces;
            }
            ++lemma_instances;
            run->check(name + ": reduction identity on singular vectors (exact)", sing_ok && spaces > 0,
                       {{"singular_spaces", spaces}, {"holds_on_whole_blocks", full}});
        });
    }
    run->data()["reduction_instances"] = lemma_instances;

    json rows = json::array();
    for (const auto& c : dual) {
        const std::string cn = case_name(c);
        guarded(*run, cn, [&] {
            auto d = build_duality(XType::A, 0, c.factors, c.targets);
            for (const auto& t : d->targets) {
                const std::string name = cn + " → " + t.spec.lambda_plus.str();
                const Point base = {Cplx(2.6, 0.2), Cplx(0.7, -0.1)};
                for (const auto& [scale, tag] : {std::pair{Rational(1), std::string("h = h_λ + ϱ")},
                                                 std::pair{Rational(1, 2), std::string("h = ½h_λ + ϱ")}}) {
                    auto sys_t = trig_system(*d->tt, t.ct, kappa, true, h_shift(*d->tt, t.ct, t.wt, scale, true, true));
                    auto sys_p = trig_system(*d->tpT, t.cp, kappa, true, h_shift(*d->tpT, t.cp, t.wp, scale, true, true));
                    auto sys_b = trig_system(*d->tbT, t.cb, kappa, true, h_shift(*d->tbT, t.cb, t.wb, scale, true, true));
                    const int nt = singular_solution_dimension(sys_t, t.st);
                    const int np = singular_solution_dimension(sys_p, t.sp);
                    const int nb = singular_solution_dimension(sys_b, t.sb);
                    run->check(name + ", " + tag + ": trigonometric singular solution dimensions agree",
                               nt == np && np == nb, {{"tilde", nt}, {"plain", np}, {"bar", nb}});
                    rows.push_back({{"case", name}, {"h", tag}, {"dims", {nt, np, nb}}});
                    if (nt == 0) continue;
                    // Transfer a tilde solution through Y and Ȳ.
                    const MatQ inv = invariant_subspace(t.st, sys_t.coefficient_basis());
                    const VecC psi0 = to_vecc(inv, 0);
                    auto tilde = transported_solution(sys_t, base, psi0);
                    double worst = 0;
                    for (int k = 0; k < 3; ++k) {
                        const Point z = sample_point(rng, 2);
                        auto local = rebased(sys_t, tilde, z);
                        worst = std::max(worst, residual(sys_t, local, z));
                        for (int side = 0; side < 2; ++side) {
                            const MatQ& ym = side ? t.ybmat : t.ymat;
                            const MatQ& P = side ? t.pb : t.p;
                            const KZSystem& target = side ? sys_b : sys_p;
                            const Eigen::MatrixXcd map = to_double(MatQ(P.transpose() * ym)).cast<Cplx>();
                            Solution moved = [=](const Point& w) -> VecC { return map * local(w); };
                            worst = std::max(worst, residual(target, moved, z));
                        }
                    }
                    run->check(name + ", " + tag + ": transferred solutions solve the plain and bar systems",
                               worst <= 1e-8, {{"max_residual", worst}});
                    if (scale == Rational(1, 2) && c.factors.size() == 2) {
                        // Closed form on the tilde side.
                        auto om = scalar_action(omega_ij(*d->tt, 0, 1, t.ct, true), t.st);
                        const RhoData rho = rho_for(*d->gt);
                        auto closed = trig_ell2_solution(psi0, *om, casimir_scalar(d->lt[0], rho),
                                                         casimir_scalar(d->lt[1], rho), kappa);
                        double r = 0;
                        for (int k = 0; k < 3; ++k) r = std::max(r, residual(sys_t, closed, sample_point(rng, 2)));
                        run->check(name + ": closed-form trigonometric solution", r <= 1e-8, {{"max_residual", r}});
                    }
                }
            }
        });
    }
    run->data()["dimensions"] = rows;
}

// ---------------------------------------------------------------- dispatch

using Driver = void (*)(const json&, json&, Run*, Rng&);

const std::map<std::string, Driver>& drivers() {
    static const std::map<std::string, Driver> d = {
        {"scalar_identity", scalar_identity},
        {"casimir_eigenvalue", casimir_eigenvalue},
        {"gaudin_commute", gaudin_commute},
        {"oc_identity", oc_identity},
        {"kz_ell2", kz_ell2},
        {"kz_transport", kz_transport},
        {"truncation_stability", truncation_stability},
        {"superduality_bijection", superduality_bijection},
        {"central_ext_correction", central_ext_correction},
        {"trig_suite", trig_suite},
    };
    return d;
}

Driver find_driver(const json& config, json& errors) {
    if (!config.is_object()) {
        errors.push_back("configuration must be a JSON object");
        return nullptr;
    }
    if (!config.contains("experiment") || !config.at("experiment").is_string()) {
        errors.push_back("experiment: missing or not a string");
        return nullptr;
    }
    const auto name = config.at("experiment").get<std::string>();
    auto it = drivers().find(name);
    if (it == drivers().end()) {
        errors.push_back("experiment: unknown experiment \"" + name + "\"");
        return nullptr;
    }
    return it->second;
}

}  // namespace

json validate_config(const json& config) {
    json errors = json::array();
    Driver d = find_driver(config, errors);
    if (d) {
        Rng rng(0);
        try {
            d(config, errors, nullptr, rng);
        } catch (const std::exception& e) {
            errors.push_back(std::string("configuration rejected: ") + e.what());
        }
    }
    return errors;
}

Report run_experiment(const json& config, std::uint64_t seed) {
    json errors = validate_config(config);
    if (!errors.empty()) throw InvalidConfig(errors);
    Report r;
    r.experiment = config.at("experiment").get<std::string>();
    r.seed = seed;
    Rng rng(seed);
    Run run(r);
    const auto t0 = std::chrono::steady_clock::now();
    find_driver(config, errors)(config, errors, &run, rng);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.assertions.empty()) run.check("at least one assertion ran", false);
    return r;
}

}  // namespace superkz
