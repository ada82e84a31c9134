#include "superkz/linalg.hpp"

#include <stdexcept>

namespace superkz {

std::vector<int> rref(MatQ& a) {
    std::vector<int> piv;
    const int rows = static_cast<int>(a.rows()), cols = static_cast<int>(a.cols());
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i)
            if (a(i, c) != 0) { p = i; break; }
        if (p < 0) continue;
        if (p != r) a.row(p).swap(a.row(r));
        Rational inv = 1 / a(r, c);
        for (int j = c; j < cols; ++j) a(r, j) *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || a(i, c) == 0) continue;
            Rational f = a(i, c);
            for (int j = c; j < cols; ++j)
                if (a(r, j) != 0) a(i, j) -= f * a(r, j);
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

int rank(const MatQ& a) {
    MatQ b = a;
    return static_cast<int>(rref(b).size());
}

MatQ nullspace(const MatQ& a) {
    MatQ b = a;
    auto piv = rref(b);
    const int cols = static_cast<int>(a.cols());
    std::vector<char> is_piv(cols, 0);
    for (int p : piv) is_piv[p] = 1;
    std::vector<int> free;
    for (int c = 0; c < cols; ++c)
        if (!is_piv[c]) free.push_back(c);
    MatQ n = MatQ::Zero(cols, static_cast<int>(free.size()));
    for (std::size_t k = 0; k < free.size(); ++k) {
        n(free[k], k) = 1;
        for (std::size_t r = 0; r < piv.size(); ++r) n(piv[r], k) = -b(r, free[k]);
    }
    return n;
}

MatQ column_basis(const MatQ& a) {
    MatQ t = a.transpose();
    auto piv = rref(t);
    MatQ out(a.rows(), static_cast<int>(piv.size()));
    for (std::size_t k = 0; k < piv.size(); ++k) out.col(k) = t.row(k).transpose();
    return out;
}

std::optional<VecQ> solve(const MatQ& a, const VecQ& b) {
    MatQ aug(a.rows(), a.cols() + 1);
    aug << a, b;
    auto piv = rref(aug);
    if (!piv.empty() && piv.back() == a.cols()) return std::nullopt;
    VecQ x = VecQ::Zero(a.cols());
    for (std::size_t r = 0; r < piv.size(); ++r) x(piv[r]) = aug(r, a.cols());
    return x;
}

Reduction reduction(const MatQ& sub, int dim) {
    if (sub.rows() != dim && sub.cols() != 0) throw std::invalid_argument("reduction: dimension mismatch");
    Reduction red;
    red.dim = dim;
    MatQ t = sub.cols() == 0 ? MatQ(0, dim) : MatQ(sub.transpose());
    red.pivots = rref(t);
    red.rows = t.topRows(static_cast<int>(red.pivots.size()));
    std::vector<char> is_piv(dim, 0);
    for (int p : red.pivots) is_piv[p] = 1;
    for (int c = 0; c < dim; ++c)
        if (!is_piv[c]) red.keep.push_back(c);
    const int q = static_cast<int>(red.keep.size());
    red.project = MatQ::Zero(q, dim);
    red.include = MatQ::Zero(dim, q);
    for (int k = 0; k < q; ++k) {
        red.project(k, red.keep[k]) = 1;
        red.include(red.keep[k], k) = 1;
        for (std::size_t r = 0; r < red.pivots.size(); ++r)
            if (red.rows(r, red.keep[k]) != 0) red.project(k, red.pivots[r]) = -red.rows(r, red.keep[k]);
    }
    return red;
}

bool in_span(const MatQ& sub, const VecQ& v) {
    if (sub.cols() == 0) return v.isZero();
    return rank(hstack(sub, v)) == rank(sub);
}

bool same_span(const MatQ& a, const MatQ& b) {
    int ra = a.cols() ? rank(a) : 0;
    int rb = b.cols() ? rank(b) : 0;
    if (ra != rb) return false;
    if (ra == 0) return true;
    return rank(hstack(a, b)) == ra;
}

MatQ hstack(const MatQ& a, const MatQ& b) {
    if (a.cols() == 0) return b;
    if (b.cols() == 0) return a;
    MatQ c(a.rows(), a.cols() + b.cols());
    c << a, b;
    return c;
}

MatQ vstack(const MatQ& a, const MatQ& b) {
    if (a.rows() == 0) return b;
    if (b.rows() == 0) return a;
    MatQ c(a.rows() + b.rows(), a.cols());
    c << a, b;
    return c;
}

}  // namespace superkz
