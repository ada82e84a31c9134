#include "superkz/weights.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace superkz {

Partition::Partition(std::vector<int> p) : parts(std::move(p)) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] < 0) throw std::invalid_argument("negative partition part");
        if (i && parts[i] > parts[i - 1]) throw std::invalid_argument("partition parts must be weakly decreasing");
    }
    while (!parts.empty() && parts.back() == 0) parts.pop_back();
}

int Partition::size() const {
    int s = 0;
    for (int p : parts) s += p;
    return s;
}

std::string Partition::str() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? "," : "") << parts[i];
    os << ")";
    return os.str();
}

Partition conjugate(const Partition& mu) {
    std::vector<int> c;
    const int w = mu.length() ? mu.parts[0] : 0;
    for (int col = 1; col <= w; ++col) {
        int h = 0;
        for (int p : mu.parts)
            if (p >= col) ++h;
        c.push_back(h);
    }
    return Partition(c);
}

std::vector<int> frobenius_theta(const Partition& mu, int count) {
    Partition mc = conjugate(mu);
    std::vector<int> out;
    for (int k = 0; k < count; ++k) {
        const int i = k / 2 + 1;
        if (k % 2 == 0) out.push_back(std::max(mc[i - 1] - i + 1, 0));  // θ_{i−½}
        else out.push_back(std::max(mu[i - 1] - i, 0));                 // θ_i
    }
    return out;
}

std::vector<Partition> partitions_of(int total) {
    std::vector<Partition> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int left, int maxp) {
        if (left == 0) {
            out.emplace_back(cur);
            return;
        }
        for (int p = std::min(left, maxp); p >= 1; --p) {
            cur.push_back(p);
            rec(left - p, p);
            cur.pop_back();
        }
    };
    rec(total, total);
    return out;
}

nlohmann::json to_json(const DominantWeightSpec& s) {
    nlohmann::json j;
    j["lambda_plus"] = s.lambda_plus.parts;
    j["d"] = to_string(s.d);
    std::vector<std::string> h;
    for (const auto& v : s.head) h.push_back(to_string(v));
    j["head"] = h;
    return j;
}

DominantWeightSpec spec_from_json(const nlohmann::json& j) {
    DominantWeightSpec s;
    s.lambda_plus = Partition(j.at("lambda_plus").get<std::vector<int>>());
    if (j.contains("d")) {
        const auto& d = j.at("d");
        s.d = d.is_string() ? parse_rational(d.get<std::string>()) : Rational(d.get<long>());
    }
    if (j.contains("head"))
        for (const auto& h : j.at("head"))
            s.head.push_back(h.is_string() ? parse_rational(h.get<std::string>()) : Rational(h.get<long>()));
    return s;
}

Rational Weight::operator[](const IndexLabel& l) const {
    auto it = eps.find(l);
    return it == eps.end() ? Rational(0) : it->second;
}

void Weight::set(const IndexLabel& l, const Rational& v) {
    if (v == 0) eps.erase(l);
    else eps[l] = v;
}

Weight Weight::operator+(const Weight& o) const {
    Weight r = *this;
    for (const auto& [l, v] : o.eps) r.set(l, r[l] + v);
    r.level += o.level;
    return r;
}

Weight Weight::operator-(const Weight& o) const { return *this + o * Rational(-1); }

Weight Weight::operator*(const Rational& c) const {
    Weight r;
    if (c == 0) return r;
    for (const auto& [l, v] : eps) r.eps[l] = v * c;
    r.level = level * c;
    return r;
}

bool Weight::operator<(const Weight& o) const {
    if (eps != o.eps) return eps < o.eps;
    return level < o.level;
}

std::string Weight::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [l, v] : eps) {
        os << (first ? "" : " + ") << to_string(v) << "*e" << l.str();
        first = false;
    }
    if (level != 0) os << (first ? "" : " + ") << to_string(level) << "*L0";
    if (first && level == 0) os << "0";
    return os.str();
}

Weight epsilon(const IndexLabel& l, const Rational& c) {
    Weight w;
    w.set(l, c);
    return w;
}

Weight weight_from_coords(const std::vector<Rational>& c, const std::vector<IndexLabel>& labels,
                          const Rational& level) {
    Weight w;
    for (std::size_t i = 0; i < labels.size(); ++i) w.set(labels[i], c[i]);
    w.level = level;
    return w;
}

std::vector<Rational> weight_coords(const Weight& w, const std::vector<IndexLabel>& labels) {
    std::vector<Rational> c(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) c[i] = w[labels[i]];
    for (const auto& [l, v] : w.eps)
        if (std::find(labels.begin(), labels.end(), l) == labels.end())
            throw std::invalid_argument("weight has support outside the label set: " + l.str());
    return c;
}

nlohmann::json to_json(const Weight& w) {
    nlohmann::json j;
    nlohmann::json e = nlohmann::json::object();
    for (const auto& [l, v] : w.eps) e[l.str()] = to_string(v);
    j["eps"] = e;
    j["level"] = to_string(w.level);
    return j;
}

void validate_spec(const DominantWeightSpec& spec, XType x, int m) {
    if (static_cast<int>(spec.head.size()) != m)
        throw std::invalid_argument("head length must equal m");
    if (x == XType::BDot)
        for (const auto& h : spec.head)
            if (!is_integer(h)) throw std::invalid_argument("head entries must be integers for b_bullet");
}

namespace {

Weight head_and_level(const DominantWeightSpec& spec, int m) {
    Weight w;
    for (int i = 0; i < m; ++i) w.set(IndexLabel::make(2 * (i - m)), spec.head[i]);
    w.level = spec.d;
    return w;
}

}  // namespace

int minimal_rank(const DominantWeightSpec& spec, Series s) {
    const Partition& p = spec.lambda_plus;
    switch (s) {
        case Series::Plain: return std::max(1, p.length());
        case Series::Bar: return std::max(1, p.length() ? p.parts[0] : 0);
        case Series::Tilde: {
            auto th = frobenius_theta(p, 2 * (p.size() + 1));
            int n = 1;
            for (std::size_t k = 0; k < th.size(); ++k)
                if (th[k]) n = std::max(n, static_cast<int>(k / 2 + 1));
            return n;
        }
    }
    return 1;
}

Weight make_weight(const DominantWeightSpec& spec, Series s, XType x, int m, int n) {
    validate_spec(spec, x, m);
    if (minimal_rank(spec, s) > n)
        throw NotRepresentable("weight " + spec.lambda_plus.str() + " not representable at rank " + std::to_string(n));
    Weight w = head_and_level(spec, m);
    const Partition& p = spec.lambda_plus;
    switch (s) {
        case Series::Plain:
            for (int j = 1; j <= n; ++j) w.set(IndexLabel::make(2 * j), p[j - 1]);
            break;
        case Series::Bar: {
            Partition pc = conjugate(p);
            for (int j = 1; j <= n; ++j) w.set(IndexLabel::make(2 * j - 1), pc[j - 1]);
            break;
        }
        case Series::Tilde: {
            auto th = frobenius_theta(p, 2 * n);
            for (int k = 0; k < 2 * n; ++k) w.set(IndexLabel::make(k + 1), th[k]);
            break;
        }
    }
    return w;
}

Weight ring_weight(const DominantWeightSpec& spec, Series s, XType x, int m, int n) {
    Weight w = make_weight(spec, s, x, m, n);
    for (const auto& l : build_index_set(s, true, m, n)) {
        if (!l.is_tail()) continue;
        w.set(l, w[l] - sign2j(l) * spec.d);
    }
    return w;
}

Rational hstar_form(const Weight& a, const Weight& b) {
    Rational s = 0;
    for (const auto& [l, v] : a.eps) {
        auto it = b.eps.find(l);
        if (it != b.eps.end()) s += sign2j(l) * v * it->second;
    }
    for (const auto& [l, v] : b.eps) s -= delta(l) * a.level * v;
    for (const auto& [l, v] : a.eps) s -= delta(l) * b.level * v;
    return s;
}

Rational r_x(XType x, int m) {
    switch (x) {
        case XType::A: return -1;
        case XType::B:
        case XType::BDot: return Rational(-2 * m - 1, 2);
        case XType::C: return -m - 1;
        case XType::D: return -m;
    }
    return 0;
}

RhoData rho_data(Series s, XType x, int m, int n) {
    RhoData r;
    r.series = s;
    r.x = x;
    r.m = m;
    r.n = n;
    const Rational rx = r_x(x, m);
    for (const auto& l : build_index_set(s, true, m, n)) {
        const Rational j = l.value();
        const int dj = delta(l);
        Rational c;
        switch (s) {
            case Series::Tilde: c = rx + dj - sign2j(l) * j * (1 - dj); break;
            case Series::Plain: c = rx - j + dj; break;
            case Series::Bar: c = rx - sign2j(l) * (j + Rational(dj, 2)); break;
        }
        r.varrho[l] = c;
    }
    return r;
}

Rational RhoData::pairing(const Weight& w) const {
    Rational s = 0;
    for (const auto& [l, v] : w.eps) {
        auto it = varrho.find(l);
        if (it == varrho.end()) throw std::invalid_argument("weight outside the rank of ϱ: " + l.str());
        s += v * it->second;
    }
    return s;
}

Rational casimir_scalar(const Weight& w, const RhoData& rho) { return hstar_form(w, w) + 2 * rho.pairing(w); }

Rational casimir_scalar(const DominantWeightSpec& spec, Series s, XType x, int m, int n) {
    return casimir_scalar(make_weight(spec, s, x, m, n), rho_data(s, x, m, n));
}

bool weight_in_Xi(const Weight& mu, Series s, XType x, int m, int n_cap) {
    for (const auto& [l, v] : mu.eps) {
        if (l.barred) return false;
        if (l.is_head()) {
            if (-l.twice / 2 > m) return false;
            if (x == XType::BDot && !is_integer(v)) return false;
            continue;
        }
        if (!series_has_tail_label(s, l)) return false;
        if (l.twice > 2 * n_cap) return false;
        if (!is_integer(v) || v < 0) return false;
    }
    return true;
}

int weight_parity(const Weight& mu, XType x) {
    Rational s = 0;
    for (const auto& [l, v] : mu.eps) {
        const bool counted = (x == XType::BDot) ? !l.is_half() : (l.is_tail() && l.is_half());
        if (counted) s += v;
    }
    if (!is_integer(s)) throw std::invalid_argument("weight parity undefined for non-integral coefficients");
    long p = to_long(s) % 2;
    return static_cast<int>(p < 0 ? -p : p);
}

}  // namespace superkz
