#pragma once

#include "superkz/linalg.hpp"
#include "superkz/superalgebra.hpp"
#include "superkz/weights.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace superkz {

enum class ModuleKind { Verma, ParabolicVerma, Irreducible, Restricted };
std::string to_string(ModuleKind k);

struct Block {
    std::vector<int> coords;  // simple-root coordinates below the highest weight
    int depth = 0;
    Weight weight;
    int dim = 0;
    int parity = 0;
};

// Action of one basis element on one block.
struct BlockAction {
    int target = -1;    // -1: the element acts by zero on this block
    bool lost = false;  // the image lies past the truncation depth and is not recorded
    SpQ mat;            // target.dim x source.dim
};

class WeightModule {
public:
    AlgebraPtr algebra;
    Weight hw;
    ModuleKind kind = ModuleKind::Verma;
    int depth = 0;    // blocks are present up to this depth
    int exact_to = 0;  // raising/Cartan exact up to `depth`, lowering exact from blocks below this
    int hw_parity = 0;

    std::vector<Block> blocks;
    std::vector<std::vector<BlockAction>> actions;  // [basis element][block]

    // PBW keys of the underlying Verma basis (Verma modules only).
    std::vector<std::vector<std::vector<int>>> keys;
    // Quotient bookkeeping: block basis as columns in the parent's block coordinates.
    std::shared_ptr<const WeightModule> parent;
    std::vector<int> parent_block;
    std::vector<MatQ> parent_include;
    std::vector<MatQ> parent_sub;  // quotient modules: the submodule divided out, per parent block

    int find_block(const std::vector<int>& coords) const;
    int find_block(const Weight& w) const;
    std::optional<std::vector<int>> coords_of(const Weight& w) const;
    int total_dim() const;
    Rational level() const { return hw.level; }
    Rational cartan_value(int j, int block) const;  // weight of the block evaluated on E_j
    const BlockAction& act(int elem, int block) const { return actions[elem][block]; }
    std::vector<int> shift(int elem) const;  // coordinate change caused by a basis element

    void index_blocks();

private:
    std::map<std::vector<int>, int> block_index_;
};

using ModulePtr = std::shared_ptr<const WeightModule>;

Weight weight_at(const AlgebraInstance& g, const Weight& hw, const std::vector<int>& coords);

// Parity of the highest weight vector from the weight rule; 0 when the rule is undefined.
int default_hw_parity(const Weight& hw, XType x);

ModulePtr build_verma(AlgebraPtr g, const Weight& hw, int depth, std::optional<int> hw_parity = std::nullopt);

// Quotient by a submodule given as column spans per block.
ModulePtr quotient(ModulePtr m, const std::vector<MatQ>& sub, ModuleKind kind);

// Maximal submodule avoiding the highest weight, per block (columns).
std::vector<MatQ> radical(const WeightModule& m);

// S(I,J) = highest-weight coefficient of σ(f_I) f_J v, with σ reversing words and swapping E^β ↔ E_β.
std::vector<MatQ> contravariant_form(const WeightModule& verma);

// Submodule generated by the radical of the Levi Verma part; `levi` lists simple-root positions.
std::vector<MatQ> levi_submodule(const WeightModule& verma, const std::vector<int>& levi);
std::vector<int> default_levi(const AlgebraInstance& g);

struct InvalidParabolicWeight : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

ModulePtr parabolic_verma(AlgebraPtr g, const Weight& hw, int depth,
                          std::optional<std::vector<int>> levi = std::nullopt,
                          std::optional<int> hw_parity = std::nullopt);
ModulePtr irreducible_quotient(ModulePtr m);

// Kernel of the stacked raising operators on a block (columns).
MatQ singular_vectors(const WeightModule& m, int block, bool all_roots = false);

// Restriction to a subalgebra: keeps blocks whose weight passes `keep`, re-keyed below `hw_sub`.
ModulePtr restrict_module(ModulePtr m, AlgebraPtr sub, const Weight& hw_sub,
                          const std::function<bool(const Weight&)>& keep, std::optional<int> depth_cap = std::nullopt);
ModulePtr truncate(ModulePtr m, AlgebraPtr sub_k);
ModulePtr functor_T(ModulePtr m, AlgebraPtr target, std::optional<int> depth_cap = std::nullopt);

// Block-by-block exact comparison of weights, dimensions and matrices.
bool same_module(const WeightModule& a, const WeightModule& b, std::string* why = nullptr);

// Kernel of the projection from the underlying Verma module onto a quotient, per block of the Verma.
std::vector<MatQ> verma_kernel(const WeightModule& q, ModulePtr* verma = nullptr);

// Certifies b ≅ a up to depth `max_depth` (in a's coordinates): a is a Verma module or a quotient of one,
// b has a one-dimensional block at a's highest weight. The map f_J v ↦ f_J u is checked to intertwine
// all basis elements, to be onto, and to have kernel equal to a's defining submodule.
bool certify_isomorphism(const WeightModule& a, const WeightModule& b, int max_depth, std::string* why = nullptr);

std::string summary_csv(const WeightModule& m);

// Words in basis elements, applied right to left: word = {x_1, …, x_k} means x_1 ⋯ x_k.
using Word = std::vector<int>;
std::vector<Word> pbw_words(const AlgebraInstance& g, const std::vector<int>& roots, bool lowering,
                            const std::vector<int>& coords, int max_degree);

}  // namespace superkz
