#include "superkz/rational.hpp"

#include <stdexcept>

namespace superkz {

std::string to_string(const Rational& q) {
    return q.str();
}

Rational parse_rational(const std::string& s) {
    auto trim = [](std::string t) {
        auto b = t.find_first_not_of(" \t");
        auto e = t.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    std::string t = trim(s);
    if (t.empty()) throw std::invalid_argument("empty rational");
    auto slash = t.find('/');
    auto parse_int = [](const std::string& u) {
        if (u.empty()) throw std::invalid_argument("bad rational");
        std::size_t i = (u[0] == '-' || u[0] == '+') ? 1 : 0;
        if (i == u.size()) throw std::invalid_argument("bad rational: " + u);
        for (; i < u.size(); ++i)
            if (u[i] < '0' || u[i] > '9') throw std::invalid_argument("bad rational: " + u);
        return boost::multiprecision::mpz_int(u[0] == '+' ? u.substr(1) : u);
    };
    if (slash == std::string::npos) return Rational(parse_int(t));
    auto num = parse_int(trim(t.substr(0, slash)));
    auto den = parse_int(trim(t.substr(slash + 1)));
    if (den == 0) throw std::invalid_argument("zero denominator: " + s);
    return Rational(num, den);
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

bool is_integer(const Rational& q) { return boost::multiprecision::denominator(q) == 1; }

long to_long(const Rational& q) {
    if (!is_integer(q)) throw std::invalid_argument("not an integer: " + to_string(q));
    return boost::multiprecision::numerator(q).convert_to<long>();
}

bool is_zero(const SpQ& a) {
    for (int k = 0; k < a.outerSize(); ++k)
        for (SpQ::InnerIterator it(a, k); it; ++it)
            if (it.value() != 0) return false;
    return true;
}

bool equal(const SpQ& a, const SpQ& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    SpQ d = a - b;
    return is_zero(d);
}

SpQ sparse_identity(int n) {
    SpQ m(n, n);
    m.setIdentity();
    return m;
}

SpQ sparse_zero(int rows, int cols) { return SpQ(rows, cols); }

MatQ to_dense(const SpQ& a) { return MatQ(a); }

SpQ to_sparse(const MatQ& a) {
    std::vector<TripletQ> t;
    for (int j = 0; j < a.cols(); ++j)
        for (int i = 0; i < a.rows(); ++i)
            if (a(i, j) != 0) t.emplace_back(i, j, a(i, j));
    SpQ m(a.rows(), a.cols());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

Eigen::MatrixXd to_double(const SpQ& a) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.rows(), a.cols());
    for (int k = 0; k < a.outerSize(); ++k)
        for (SpQ::InnerIterator it(a, k); it; ++it) m(it.row(), it.col()) = to_double(it.value());
    return m;
}

Eigen::MatrixXd to_double(const MatQ& a) {
    Eigen::MatrixXd m(a.rows(), a.cols());
    for (int j = 0; j < a.cols(); ++j)
        for (int i = 0; i < a.rows(); ++i) m(i, j) = to_double(a(i, j));
    return m;
}

}  // namespace superkz
