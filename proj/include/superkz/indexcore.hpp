#pragma once

#include "superkz/rational.hpp"

#include <string>
#include <vector>

namespace superkz {

enum class Series { Tilde, Plain, Bar };
enum class XType { A, B, BDot, C, D };

std::string to_string(Series s);
std::string to_string(XType x);
Series parse_series(const std::string& s);
XType parse_xtype(const std::string& s);

// Half-integer label stored as twice its value. The distinguished 0̄ is
// {twice = 0, barred = true}.
struct IndexLabel {
    int twice = 0;
    bool barred = false;

    static IndexLabel make(int twice_value, bool barred = false);
    static IndexLabel zero_bar() { return {0, true}; }

    bool is_zero_bar() const { return barred && twice == 0; }
    bool is_half() const { return twice % 2 != 0; }
    bool is_head() const { return twice < 0; }
    bool is_tail() const { return twice > 0; }
    Rational value() const { return Rational(twice, 2); }
    IndexLabel bar() const { return {twice, !barred}; }

    std::string str() const;
    static IndexLabel parse(const std::string& s);

    bool operator==(const IndexLabel&) const = default;
};

// The displayed total order: n̄ < … < ½̄ < −1̄ < … < −m̄ < 0̄ < −m < … < −1 < ½ < … < n.
bool operator<(const IndexLabel& a, const IndexLabel& b);
inline bool operator>(const IndexLabel& a, const IndexLabel& b) { return b < a; }

int parity(const IndexLabel& l, XType x);

// δ_j: 1 on the positive tail, 0 on the head.
inline int delta(const IndexLabel& l) { return l.twice > 0 ? 1 : 0; }
// (−1)^{2j}
inline int sign2j(const IndexLabel& l) { return l.is_half() ? -1 : 1; }

bool series_has_tail_label(Series s, const IndexLabel& l);

std::vector<IndexLabel> build_index_set(Series s, bool positive_only, int m, int n);

// Labels of the natural super space on which the algebra of type x acts.
std::vector<IndexLabel> vector_space_labels(Series s, XType x, int m, int n);

}  // namespace superkz
