#include "superkz/indexcore.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace superkz {

std::string to_string(Series s) {
    switch (s) {
        case Series::Tilde: return "tilde";
        case Series::Plain: return "plain";
        case Series::Bar: return "bar";
    }
    return "?";
}

std::string to_string(XType x) {
    switch (x) {
        case XType::A: return "a";
        case XType::B: return "b";
        case XType::BDot: return "b_bullet";
        case XType::C: return "c";
        case XType::D: return "d";
    }
    return "?";
}

Series parse_series(const std::string& s) {
    if (s == "tilde") return Series::Tilde;
    if (s == "plain") return Series::Plain;
    if (s == "bar") return Series::Bar;
    throw std::invalid_argument("unknown series: " + s);
}

XType parse_xtype(const std::string& s) {
    if (s == "a") return XType::A;
    if (s == "b") return XType::B;
    if (s == "b_bullet" || s == "bdot" || s == "b•") return XType::BDot;
    if (s == "c") return XType::C;
    if (s == "d") return XType::D;
    throw std::invalid_argument("unknown type: " + s);
}

IndexLabel IndexLabel::make(int twice_value, bool barred) {
    if (twice_value == 0 && !barred) throw std::invalid_argument("label 0 only exists as 0̄");
    if (twice_value < 0 && twice_value % 2 != 0) throw std::invalid_argument("head labels are integers");
    return {twice_value, barred};
}

std::string IndexLabel::str() const {
    std::string v = (twice % 2 == 0) ? std::to_string(twice / 2) : std::to_string(twice) + "/2";
    return barred ? "bar(" + v + ")" : v;
}

IndexLabel IndexLabel::parse(const std::string& s) {
    if (s.rfind("bar(", 0) == 0 && s.back() == ')') {
        Rational v = parse_rational(s.substr(4, s.size() - 5));
        return make(static_cast<int>(to_long(v * 2)), true);
    }
    Rational v = parse_rational(s);
    return make(static_cast<int>(to_long(v * 2)), false);
}

namespace {
std::tuple<int, int> order_key(const IndexLabel& l) {
    if (l.is_zero_bar()) return {1, 0};
    if (l.barred) return {0, -l.twice};
    return {2, l.twice};
}
}  // namespace

bool operator<(const IndexLabel& a, const IndexLabel& b) { return order_key(a) < order_key(b); }

int parity(const IndexLabel& l, XType x) {
    if (l.is_zero_bar()) {
        switch (x) {
            case XType::A: throw std::invalid_argument("0̄ is not a label for type a");
            case XType::BDot:
            case XType::C: return 1;
            case XType::B:
            case XType::D: return 0;
        }
    }
    return l.is_half() ? 1 : 0;
}

bool series_has_tail_label(Series s, const IndexLabel& l) {
    if (l.twice <= 0) return true;
    switch (s) {
        case Series::Tilde: return true;
        case Series::Plain: return !l.is_half();
        case Series::Bar: return l.is_half();
    }
    return false;
}

std::vector<IndexLabel> build_index_set(Series s, bool positive_only, int m, int n) {
    if (m < 0) throw std::invalid_argument("m < 0");
    if (n <= 0) throw std::invalid_argument("n must be positive");
    std::vector<IndexLabel> pos;
    for (int j = -m; j <= -1; ++j) pos.push_back(IndexLabel::make(2 * j));
    for (int t = 1; t <= 2 * n; ++t) {
        IndexLabel l = IndexLabel::make(t);
        if (series_has_tail_label(s, l)) pos.push_back(l);
    }
    if (positive_only) return pos;
    std::vector<IndexLabel> all = pos;
    for (const auto& l : pos) all.push_back(l.bar());
    all.push_back(IndexLabel::zero_bar());
    std::sort(all.begin(), all.end());
    return all;
}

std::vector<IndexLabel> vector_space_labels(Series s, XType x, int m, int n) {
    switch (x) {
        case XType::A: return build_index_set(s, true, m, n);
        case XType::B:
        case XType::BDot: return build_index_set(s, false, m, n);
        case XType::C:
        case XType::D: {
            auto all = build_index_set(s, false, m, n);
            all.erase(std::remove_if(all.begin(), all.end(), [](const IndexLabel& l) { return l.is_zero_bar(); }),
                      all.end());
            return all;
        }
    }
    return {};
}

}  // namespace superkz
