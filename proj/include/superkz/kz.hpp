#pragma once

#include "superkz/casimir.hpp"

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace superkz {

using Cplx = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;
using Point = std::vector<Cplx>;

enum class KZVariant { Rational, Trigonometric };

// KZ system restricted to one weight block of a tensor module.
//   rational:        κ ∂_i ψ      = A_i(z) ψ,  A_i = Σ_{j≠i} Ω^{(ij)}/(z_i − z_j)
//   trigonometric:   κ z_i ∂_i ψ  = A_i(z) ψ,  A_i = Σ_{j≠i} R^{(ij)}(z_i/z_j) + h^{(i)}
struct KZSystem {
    KZVariant variant = KZVariant::Rational;
    Rational kappa = 1;
    int sites = 0;
    int dim = 0;
    std::vector<std::vector<MatQ>> omega;  // [i][j]
    std::vector<std::vector<MatQ>> omega_plus, omega_minus;
    std::vector<MatQ> h;

    MatQ coefficient(int i, const std::vector<Rational>& z) const;
    MatC coefficient(int i, const Point& z) const;
    // Matrices spanning every A_i(z) as z varies.
    std::vector<MatQ> coefficient_basis() const;

private:
    friend KZSystem rational_system(const TensorModule&, const std::vector<int>&, const Rational&, bool);
    friend KZSystem trig_system(const TensorModule&, const std::vector<int>&, const Rational&, bool, std::vector<MatQ>);
    void cache_doubles();
    std::vector<std::vector<MatC>> omega_c_, plus_c_, minus_c_;
    std::vector<MatC> h_c_;
};

KZSystem rational_system(const TensorModule& t, const std::vector<int>& coords, const Rational& kappa, bool with_k);
KZSystem trig_system(const TensorModule& t, const std::vector<int>& coords, const Rational& kappa, bool with_k,
                     std::vector<MatQ> h);

// (scale·h_γ + ϱ)^{(i)} for every site; ϱ omitted when plus_varrho is false.
std::vector<MatQ> h_shift(const TensorModule& t, const std::vector<int>& coords, const Weight& gamma,
                          const Rational& scale, bool plus_varrho, bool with_k);

struct PoleProximity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TransportOptions {
    double tol = 1e-13;
    double pole_min = 1e-6;
};

// Parallel transport along a polyline of points in configuration space.
VecC integrate(const KZSystem& sys, const std::vector<Point>& polyline, const VecC& psi0,
               const TransportOptions& opt = {});

using Solution = std::function<VecC(const Point&)>;

// Solution obtained by straight-line transport from a base point.
Solution transported_solution(const KZSystem& sys, Point base, VecC psi0, TransportOptions opt = {});

// max_i ‖κ D_i ψ − A_i ψ‖_∞, D_i = ∂_i or z_i∂_i, derivative by 5-point central differences of step h.
double residual(const KZSystem& sys, const Solution& psi, const Point& z, double h = 2e-4);

// Principal branch z^a.
Cplx cpow(Cplx z, double a);

// ω = ½[(μ+2ρ,μ) − (λ¹+2ρ,λ¹) − (λ²+2ρ,λ²)]
Rational ell2_exponent(const Weight& mu, const Weight& l1, const Weight& l2, const RhoData& rho);
// (z₁ − z₂)^{ω/κ} v
Solution ell2_solution(const VecC& v, const Rational& omega, const Rational& kappa);
// (z₁ − z₂)^{ω/κ} z₁^{c₁/2κ} z₂^{c₂/2κ} v
Solution trig_ell2_solution(const VecC& v, const Rational& omega, const Rational& c1, const Rational& c2,
                            const Rational& kappa);

// Scalar by which `op` acts on span(basis), if it does.
std::optional<Rational> scalar_action(const MatQ& op, const MatQ& basis);

// Largest subspace of span(s) invariant under every operator in `ops` (columns).
MatQ invariant_subspace(const MatQ& s, const std::vector<MatQ>& ops);

// Dimension of the space of solutions with values in span(singular): the largest invariant subspace
// of the coefficient matrices inside the singular vectors.
int singular_solution_dimension(const KZSystem& sys, const MatQ& singular);

// Scalar function relating ring-side and extended-side solutions:
//   plain: Π(z_i − z_j)^{−n d_i d_j/κ} [Π z_r^{n d_r (d − d_r)/2κ}],  bar: inverse exponents,  tilde: 1.
Cplx correction_factor(Series s, int n, const std::vector<Rational>& d, const Rational& kappa, const Point& z,
                       bool trig);

// Basis correspondence between a block of `from` and the block of the same weight in `to`, when every
// factor of `from` is a restriction whose blocks keep the basis of `to`'s factor blocks of equal weight.
MatQ block_embedding(const TensorModule& from, const std::vector<int>& cf, const TensorModule& to,
                     const std::vector<int>& ct);

struct SearchExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Y: lowering PBW monomial in Levi root vectors of weight target − hw, nonzero on the highest weight
// vector of `v`; X: raising monomial with X Y v = scale·v.
struct TransferMaps {
    Word y;
    Word x;
    Rational scale = 1;
};
TransferMaps transfer_maps(const WeightModule& v, const Weight& target, int max_degree);

// Σ_{j ≥ ½} μ̄(E_j)
int compute_k0(const Weight& mu_bar);

}  // namespace superkz
