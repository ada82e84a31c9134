#pragma once

#include "superkz/tensor.hpp"
#include "superkz/weights.hpp"

#include <vector>

namespace superkz {

// coef · a b, applied as b first; either index may be kCentralK.
struct QuadTerm {
    int a = 0;
    int b = 0;
    Rational coef;
};

// Σ coef · a ⊗ b
struct BilinearOperator {
    std::vector<QuadTerm> terms;
};

// Element of U(g): quadratic part, linear Cartan part (including ϱ) as coefficients over cartan labels.
struct CasimirElement {
    std::vector<QuadTerm> quad;
    std::vector<Rational> linear;
};

// `with_k` selects the centrally extended formula; otherwise all K terms are dropped.
CasimirElement casimir_element(const AlgebraInstance& g, bool with_k);
BilinearOperator casimir_tensor(const AlgebraInstance& g, bool with_k);

struct TrigKernels {
    BilinearOperator zero;   // Ω₀
    BilinearOperator plus;   // Ω₀ + Σ (−1)^{|β|} E_β ⊗ E^β
    BilinearOperator minus;  // Ω₀ + Σ E^β ⊗ E_β
};
TrigKernels trig_kernels(const AlgebraInstance& g, bool with_k);

RhoData rho_for(const AlgebraInstance& g);

// c on one block of a module.
MatQ casimir_on_block(const WeightModule& m, int block, bool with_k);

// A^{(ij)} on a tensor block.
MatQ apply_bilinear(const TensorModule& t, const BilinearOperator& op, int i, int j, const std::vector<int>& coords);
MatQ omega_ij(const TensorModule& t, int i, int j, const std::vector<int>& coords, bool with_k);

// c^{(i)} and Δ(c) on a tensor block.
MatQ casimir_site(const TensorModule& t, int site, const std::vector<int>& coords, bool with_k);
MatQ delta_casimir(const TensorModule& t, const std::vector<int>& coords, bool with_k);

// Hⁱ = Σ_{j≠i} Ω^{(ij)}/(z_i − z_j)
MatQ gaudin(const TensorModule& t, int i, const std::vector<Rational>& z, const std::vector<int>& coords, bool with_k);

// R^{(ij)}(z_i/z_j) = (z_i Ω₊^{(ij)} + z_j Ω₋^{(ij)})/(z_i − z_j)
MatQ trig_r(const TensorModule& t, int i, int j, const Rational& zi, const Rational& zj,
            const std::vector<int>& coords, bool with_k);

// h_γ at one site (site ≥ 0) or on the whole tensor (site = −1): v ↦ (γ, weight of v) v.
MatQ h_gamma(const TensorModule& t, const Weight& gamma, int site, const std::vector<int>& coords, bool with_k);
// ϱ at one site.
MatQ rho_site(const TensorModule& t, int site, const std::vector<int>& coords);

// Both sides of the trigonometric reduction identity at site i on the block of weight μ:
// Σ_{j≠i} Ω₋^{(ij)} − (½h_μ + ϱ)^{(i)}   and   Σ_β E^{β(i)} Δ(E_β) − ½c^{(i)}.
std::pair<MatQ, MatQ> trig_reduction_sides(const TensorModule& t, int i, const std::vector<int>& coords, bool with_k);

}  // namespace superkz
