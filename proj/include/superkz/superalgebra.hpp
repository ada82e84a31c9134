#pragma once

#include "superkz/indexcore.hpp"
#include "superkz/rational.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace superkz {

enum class ElementKind { Cartan, Raising, Lowering };

struct BasisElement {
    ElementKind kind = ElementKind::Cartan;
    int slot = 0;                 // Cartan label position or root position
    SpQ mat;                      // matrix over the natural super space
    int parity = 0;
    std::vector<int> eps;         // weight under the Cartan, over cartan labels
    std::string name;
};

struct RootDatum {
    std::vector<int> eps;         // coefficients of ε_j over cartan labels
    int raising = -1;             // basis index of E_β
    int lowering = -1;            // basis index of E^β
    int parity = 0;
    int height = 0;
    std::vector<int> coords;      // coefficients over the simple roots
    Rational pairing;             // ⟨E_β, E^β⟩ after normalization
    bool levi = false;
};

// Superbracket of two basis elements: a linear combination of basis elements
// plus the coefficient of K (zero unless the algebra is centrally extended).
struct Bracket {
    std::vector<std::pair<int, Rational>> terms;
    Rational k = 0;
};

class AlgebraInstance;
using AlgebraPtr = std::shared_ptr<const AlgebraInstance>;
AlgebraPtr build_algebra(Series s, XType x, int m, int n, bool central);

class AlgebraInstance {
public:
    Series series = Series::Plain;
    XType x = XType::A;
    int m = 0, n = 1;
    bool central = true;

    std::vector<IndexLabel> space;   // natural super space, ascending order
    std::vector<IndexLabel> cartan;  // positive labels, ascending order
    std::vector<BasisElement> basis;
    std::vector<RootDatum> roots;    // positive roots in PBW order
    std::vector<int> simple;         // root positions of simple roots, in label order
    MatQ form_matrix;                // defining form on the natural space (x != a)

    int dim() const { return static_cast<int>(basis.size()); }
    int cartan_dim() const { return static_cast<int>(cartan.size()); }
    int num_roots() const { return static_cast<int>(roots.size()); }
    int rank() const { return static_cast<int>(simple.size()); }
    int cartan_index(int j) const { return j; }
    int raising_index(int r) const { return cartan_dim() + r; }
    int lowering_index(int r) const { return cartan_dim() + num_roots() + r; }

    int space_pos(const IndexLabel& l) const;   // -1 if absent
    int cartan_pos(const IndexLabel& l) const;  // -1 if absent
    int space_parity(int pos) const;

    const Bracket& bracket(int a, int b) const { return brackets_[a * dim() + b]; }
    Rational form(int a, int b) const;             // invariant form ⟨·,·⟩ on basis elements
    Rational form(const SpQ& a, const SpQ& b) const;

    // Coordinates over simple roots of an ε-combination; nullopt if outside the root lattice.
    std::optional<std::vector<int>> simple_coords(const std::vector<Rational>& eps) const;
    std::vector<int> simple_eps(int s) const { return roots[simple[s]].eps; }
    int simple_parity(int s) const { return roots[simple[s]].parity; }
    bool simple_is_levi(int s) const { return roots[simple[s]].levi; }

    // J = −Σ_{r ≥ ½} E_rr over unbarred tail labels present in the space.
    SpQ j_matrix() const;

    // Decomposition of a matrix in the basis; throws if the matrix is outside the span.
    std::vector<std::pair<int, Rational>> decompose(const SpQ& a) const;

    nlohmann::json to_json() const;
    std::string describe() const;

    void finalize();  // builds bracket tables; called by build_algebra

private:
    friend AlgebraPtr build_algebra(Series, XType, int, int, bool);
    std::vector<Bracket> brackets_;
    MatQ simple_left_inverse_;
    MatQ simple_matrix_;
    std::map<std::pair<int, int>, std::pair<int, Rational>> entry_owner_;  // (row,col) -> (basis, entry)
};

Rational defining_form(XType x, const IndexLabel& v, const IndexLabel& w);
Rational supertrace(const AlgebraInstance& g, const SpQ& a);
Rational invariant_form(const AlgebraInstance& g, const SpQ& a, const SpQ& b);
SpQ superbracket(const SpQ& a, int pa, const SpQ& b, int pb);
Rational cocycle_tau(const AlgebraInstance& g, const SpQ& a, const SpQ& b);

// ι(A) = A + Str(JA)K; returns the K coefficient.
Rational iota_k(const AlgebraInstance& g, const SpQ& a);

// The brute-force dimension of the form-preserving subalgebra (or gl for type a).
int brute_force_dimension(Series s, XType x, int m, int n);

// Sub-algebra embedding: each basis element of `sub` equals scale * (basis element of `big`).
struct Embedding {
    std::vector<int> target;
    std::vector<Rational> scale;
    std::vector<int> cartan_map;  // sub cartan position -> big cartan position
};
Embedding embed(const AlgebraInstance& sub, const AlgebraInstance& big);

// Matrix of a sub-algebra element transported to the label set of `big`.
SpQ transport_matrix(const AlgebraInstance& sub, const SpQ& a, const AlgebraInstance& big);

}  // namespace superkz
