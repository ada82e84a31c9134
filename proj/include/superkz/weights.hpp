#pragma once

#include "superkz/indexcore.hpp"
#include "superkz/rational.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace superkz {

// Weakly decreasing, trailing zeros trimmed.
struct Partition {
    std::vector<int> parts;

    Partition() = default;
    explicit Partition(std::vector<int> p);
    int size() const;  // box count
    int length() const { return static_cast<int>(parts.size()); }
    int operator[](int i) const { return i < length() ? parts[i] : 0; }  // 0-based
    bool operator==(const Partition&) const = default;
    std::string str() const;
};

Partition conjugate(const Partition& mu);
// θ(μ) in the order ½, 1, 3/2, 2, …
std::vector<int> frobenius_theta(const Partition& mu, int count);
std::vector<Partition> partitions_of(int total);

struct DominantWeightSpec {
    Partition lambda_plus;
    Rational d = 0;
    std::vector<Rational> head;  // λ_{−m}, …, λ_{−1}
};

nlohmann::json to_json(const DominantWeightSpec& s);
DominantWeightSpec spec_from_json(const nlohmann::json& j);

// Finitely supported combination of ε_j plus a Λ₀ coefficient. Zero entries are never stored.
struct Weight {
    std::map<IndexLabel, Rational> eps;
    Rational level = 0;

    Rational operator[](const IndexLabel& l) const;
    void set(const IndexLabel& l, const Rational& v);
    Weight operator+(const Weight& o) const;
    Weight operator-(const Weight& o) const;
    Weight operator*(const Rational& c) const;
    bool operator==(const Weight& o) const { return eps == o.eps && level == o.level; }
    bool operator<(const Weight& o) const;
    bool is_zero() const { return eps.empty() && level == 0; }
    std::string str() const;
};

Weight epsilon(const IndexLabel& l, const Rational& c = 1);
Weight weight_from_coords(const std::vector<Rational>& c, const std::vector<IndexLabel>& labels,
                          const Rational& level);
std::vector<Rational> weight_coords(const Weight& w, const std::vector<IndexLabel>& labels);
nlohmann::json to_json(const Weight& w);

// Thrown when a dominant weight does not fit at the requested rank.
struct NotRepresentable : std::domain_error {
    using std::domain_error::domain_error;
};

void validate_spec(const DominantWeightSpec& spec, XType x, int m);
Weight make_weight(const DominantWeightSpec& spec, Series s, XType x, int m, int n);
Weight ring_weight(const DominantWeightSpec& spec, Series s, XType x, int m, int n);
// Smallest n at which the spec is representable in the series.
int minimal_rank(const DominantWeightSpec& spec, Series s);

Rational hstar_form(const Weight& a, const Weight& b);

struct RhoData {
    Series series = Series::Plain;
    XType x = XType::A;
    int m = 0, n = 1;
    std::map<IndexLabel, Rational> varrho;  // coefficient of E_j in ϱ

    Rational pairing(const Weight& w) const;  // (ρ, w) = w(ϱ)
};

Rational r_x(XType x, int m);
RhoData rho_data(Series s, XType x, int m, int n);

// (λ + 2ρ, λ)
Rational casimir_scalar(const Weight& w, const RhoData& rho);
Rational casimir_scalar(const DominantWeightSpec& spec, Series s, XType x, int m, int n);

bool weight_in_Xi(const Weight& mu, Series s, XType x, int m, int n_cap);
// Parity of a weight space under the ℤ₂-gradation; requires integral tail coefficients.
int weight_parity(const Weight& mu, XType x);

}  // namespace superkz
