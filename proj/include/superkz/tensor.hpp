#pragma once

#include "superkz/modules.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace superkz {

// Basis element index standing for the central element K in operator terms.
inline constexpr int kCentralK = -1;

struct TensorBlock {
    std::vector<int> coords;
    int depth = 0;
    Weight weight;
    int dim = 0;
    std::vector<std::vector<int>> combos;  // factor block per site
    std::vector<int> offsets;              // first basis index of each combo
    std::vector<int> parity;               // per basis vector
    std::map<std::vector<int>, int> combo_index;
};

struct TensorAction {
    std::vector<int> target;
    bool zero = false;
    bool lost = false;
    SpQ mat;  // target.dim x source.dim
};

// Tensor product of weight modules over a common algebra, truncated at `depth` below the
// sum of highest weights. Blocks and operator matrices are built on first use.
class TensorModule {
public:
    TensorModule(std::vector<ModulePtr> factors, int depth);

    AlgebraPtr algebra;
    std::vector<ModulePtr> factors;
    Weight hw;
    int depth = 0;

    int sites() const { return static_cast<int>(factors.size()); }
    std::optional<std::vector<int>> coords_of(const Weight& w) const;
    const TensorBlock& block(const std::vector<int>& coords) const;
    const TensorBlock* block_at(const Weight& w) const;  // nullptr outside the truncation
    std::vector<std::vector<int>> all_coords() const;    // every nonempty block

    // x^{(site)} with the Koszul sign (−1)^{|x| Σ_{j<site} |v_j|}; x = kCentralK acts by the site level.
    const TensorAction& site_action(int site, int x, const std::vector<int>& coords) const;
    // Δ(x) = Σ_i x^{(i)}
    TensorAction delta_action(int x, const std::vector<int>& coords) const;

    // x^{(i)} y^{(j)} on a block whose total shift is zero. For i ≠ j the raising factor is applied
    // first so no intermediate vector leaves the truncation.
    MatQ product(int i, int x, int j, int y, const std::vector<int>& coords) const;

    // Cartan element Σ c_j E_j + c_K K acting at one site, diagonal on a block.
    MatQ site_cartan(int site, const std::vector<Rational>& c, const Rational& ck, const std::vector<int>& coords) const;

    // Δ applied along a word x_1 ⋯ x_k (rightmost first) to the columns of v; returns the final block.
    std::pair<std::vector<int>, MatQ> apply_word(const Word& w, const std::vector<int>& coords, const MatQ& v) const;

    // Joint kernel of Δ(E_β) over all positive roots on a block.
    MatQ singular_vectors(const std::vector<int>& coords) const;

private:
    std::vector<int> shift(int x) const;
    void combos_rec(int site, std::vector<int>& rem, std::vector<int>& cur,
                    std::vector<std::vector<int>>& out) const;

    mutable std::recursive_mutex mu_;
    mutable std::map<std::vector<int>, TensorBlock> blocks_;
    mutable std::map<std::tuple<int, int, std::vector<int>>, TensorAction> actions_;
};

// The same word applied in a single module.
std::pair<int, MatQ> apply_word(const WeightModule& m, const Word& w, int block, const MatQ& v);

}  // namespace superkz
