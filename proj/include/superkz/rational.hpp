#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>
#include <utility>
#include <vector>

namespace superkz {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

using MatQ = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using VecQ = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using SpQ = Eigen::SparseMatrix<Rational>;
using TripletQ = Eigen::Triplet<Rational>;

// "p/q" (or "p" when q = 1)
std::string to_string(const Rational& q);
// accepts "p", "p/q", and plain decimal integers; throws std::invalid_argument
Rational parse_rational(const std::string& s);
double to_double(const Rational& q);

bool is_integer(const Rational& q);
long to_long(const Rational& q);  // requires is_integer

bool is_zero(const SpQ& a);
bool equal(const SpQ& a, const SpQ& b);
SpQ sparse_identity(int n);
SpQ sparse_zero(int rows, int cols);
MatQ to_dense(const SpQ& a);
SpQ to_sparse(const MatQ& a);
Eigen::MatrixXd to_double(const SpQ& a);
Eigen::MatrixXd to_double(const MatQ& a);

}  // namespace superkz
