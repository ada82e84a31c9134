// One line per acceptance criterion; exit status is nonzero if any criterion fails.

#include "superkz/experiments.hpp"
#include "superkz/weights.hpp"

#include <json.hpp>

#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::json;
using superkz::Report;

namespace {

constexpr std::uint64_t kSeed = 20261015;

constexpr double kScalarSeconds = 5.0;
constexpr double kCasimirSeconds = 60.0;
constexpr double kGaudinSeconds = 120.0;
constexpr double kTransportRelTol = 1e-8;
constexpr double kTruncationResidualTol = 1e-9;
constexpr double kCorrectionResidualTol = 1e-9;
constexpr double kTrigResidualTol = 1e-8;
constexpr int kScalarSamples = 200;
constexpr int kCasimirPairs = 10;
constexpr int kOcInstances = 6;
constexpr int kDualityInstances = 3;
constexpr int kCorrectionSamples = 20;
constexpr int kReductionInstances = 3;
constexpr int kMaxBoxes = 8;

struct Outcome {
    bool pass = true;
    std::string note;

    void require(bool ok, const std::string& why) {
        if (!ok) {
            pass = false;
            note += (note.empty() ? "" : "; ") + why;
        }
    }
};

Report run(const std::string& name) { return superkz::run_experiment({{"experiment", name}}, kSeed); }

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

std::vector<const superkz::Assertion*> matching(const Report& r, const std::string& part) {
    std::vector<const superkz::Assertion*> out;
    for (const auto& a : r.assertions)
        if (contains(a.name, part)) out.push_back(&a);
    return out;
}

bool all_pass(const std::vector<const superkz::Assertion*>& as) {
    for (const auto* a : as)
        if (!a->pass) return false;
    return true;
}

// Largest number stored under keys accepted by `pick`, searched recursively.
double max_number(const json& j, const std::function<bool(const std::string&)>& pick) {
    double m = 0;
    if (j.is_object())
        for (const auto& [k, v] : j.items()) {
            if (v.is_number() && pick(k)) m = std::max(m, v.get<double>());
            else m = std::max(m, max_number(v, pick));
        }
    else if (j.is_array())
        for (const auto& v : j) m = std::max(m, max_number(v, pick));
    return m;
}

Outcome scalar_identity() {
    Outcome o;
    const Report r = run("scalar_identity");
    const auto rows = matching(r, "tilde = plain = bar scalar");
    o.require(rows.size() == 5, "expected one row per type");
    for (const auto* a : rows)
        o.require(a->pass && a->detail.value("samples", 0) == kScalarSamples &&
                      a->detail.value("agree", 0) == kScalarSamples,
                  a->name);
    o.require(r.seconds < kScalarSeconds, "runtime " + fmt(r.seconds) + " s");
    o.note = o.pass ? "5 types x " + std::to_string(kScalarSamples) + " specs agree exactly, " + fmt(r.seconds) + " s"
                    : o.note;
    return o;
}

Outcome casimir_eigenvalue() {
    Outcome o;
    const Report r = run("casimir_eigenvalue");
    const auto rows = matching(r, "c acts by (λ+2ρ,λ) on every vector");
    std::set<std::string> series, types;
    for (const auto* a : rows) {
        std::istringstream is(a->name);
        std::string s, x;
        is >> s >> x;
        series.insert(s);
        types.insert(x);
        o.require(a->detail.value("depth", 99) <= 3, "depth above 3");
    }
    o.require(r.pass, "experiment failed");
    o.require(static_cast<int>(rows.size()) >= kCasimirPairs && all_pass(rows), "too few passing pairs");
    o.require(series.size() == 3 && types.size() == 5, "series or types missing");
    o.require(r.seconds < kCasimirSeconds, "runtime " + fmt(r.seconds) + " s");
    if (o.pass) o.note = std::to_string(rows.size()) + " pairs over 3 series and 5 types, exact, " + fmt(r.seconds) + " s";
    return o;
}

Outcome oc_identity() {
    Outcome o;
    const Report r = run("oc_identity");
    const auto rows = matching(r, "Ω = ½(Δc − c⊗1 − 1⊗c)");
    std::set<std::string> series;
    for (const auto* a : rows) series.insert(a->name.substr(0, a->name.find(' ')));
    o.require(r.pass && all_pass(rows), "identity failed");
    o.require(static_cast<int>(rows.size()) >= kOcInstances, "too few instances");
    o.require(series.size() == 3, "not every series covered");
    if (o.pass) o.note = std::to_string(rows.size()) + " instances, all three series, exact";
    return o;
}

Outcome gaudin_commute() {
    Outcome o;
    const Report r = run("gaudin_commute");
    const auto sym = matching(r, "Ω^(ij) = Ω^(ji)");
    const auto om = matching(r, "[Ω^(ij), Δ(b)] = 0");
    const auto hh = matching(r, "[H^i, H^j] = 0");
    o.require(r.pass, "experiment failed");
    o.require(!sym.empty() && !om.empty() && !hh.empty(), "missing checks");
    o.require(r.seconds < kGaudinSeconds, "runtime " + fmt(r.seconds) + " s");
    if (o.pass)
        o.note = std::to_string(hh.size()) + " three-site instances at z = (0,1,3), exact, " + fmt(r.seconds) + " s";
    return o;
}

Outcome kz_two_point() {
    Outcome o;
    const Report a = run("kz_ell2");
    const Report b = run("kz_transport");
    o.require(a.pass && b.pass, "experiment failed");
    double worst = 0;
    for (const auto* x : matching(a, "transport reproduces the closed form"))
        worst = std::max(worst, x->detail.value("max_relative_error", 1.0));
    o.require(worst <= kTransportRelTol, "transport error " + fmt(worst));
    bool plus = false, minus = false;
    for (const auto& s : a.data["spaces"]) {
        if (!s.contains("omega_formula")) continue;
        o.require(s["omega_formula"] == s["omega_matrix"], "exponent mismatch at " + s.value("mu", ""));
        if (s.value("instance", "") == "plain a (m=0, n=2)") {
            plus = plus || s["omega_formula"] == "1";
            minus = minus || s["omega_formula"] == "-1";
        }
    }
    o.require(plus && minus, "gl(2) exponents 1 and -1 not both found");
    if (o.pass) o.note = "exponents exact incl. gl(2) values 1 and -1, max transport error " + fmt(worst);
    return o;
}

Outcome truncation_stability() {
    Outcome o;
    const Report r = run("truncation_stability");
    o.require(r.pass, "experiment failed");
    o.require(!matching(r, "(m=0, n=3) -> k=2").empty() && !matching(r, "(m=0, n=3) -> k=1").empty(),
              "(n,k) pairs missing");
    double worst = 0;
    for (const auto* a : matching(r, "restricted solutions solve the rank-k systems"))
        worst = std::max(worst, max_number(a->detail, [](const std::string& k) {
                             return contains(k, "rational") || contains(k, "trigonometric");
                         }));
    o.require(worst <= kTruncationResidualTol, "residual " + fmt(worst));
    if (o.pass) o.note = "(n,k) in {(3,2),(3,1)}, exact checks hold, max residual " + fmt(worst);
    return o;
}

Outcome superduality() {
    Outcome o;
    const Report r = run("superduality_bijection");
    const auto dims = matching(r, "dim S̃ = dim S = dim S̄");
    o.require(r.pass, "experiment failed");
    o.require(static_cast<int>(dims.size()) >= kDualityInstances, "too few instances");
    for (const auto* a : dims) {
        const int t = a->detail.value("tilde", -1);
        for (auto k : {"plain", "bar", "plain_T", "bar_T"}) o.require(a->detail.value(k, -2) == t, a->name);
    }
    for (auto f : {"(1)⊗(1)", "(2)⊗(1)", "(1,1)⊗(1)"}) o.require(!matching(r, f).empty(), std::string(f) + " missing");
    for (const auto* a : matching(r, "rank-k₀ plain instance")) {
        const int k0 = a->detail.value("k0", -1);
        o.require(a->detail.value("plain_dim_rank_" + std::to_string(k0), -1) == a->detail.value("bar_dim", -2),
                  a->name);
    }
    if (o.pass) o.note = std::to_string(dims.size()) + " targets, dimensions equal, X/Y certified, k0 checked";
    return o;
}

Outcome central_extension() {
    Outcome o;
    const Report r = run("central_ext_correction");
    o.require(r.pass, "experiment failed");
    double worst = 0;
    for (const auto* a : matching(r, "corrected ring solutions")) {
        o.require(a->detail.value("samples", 0) == kCorrectionSamples, "sample count");
        worst = std::max(worst, a->detail.value("max_residual", 1.0));
    }
    o.require(worst <= kCorrectionResidualTol, "residual " + fmt(worst));
    if (o.pass) o.note = "tensor shifts exact, max corrected residual " + fmt(worst);
    return o;
}

Outcome trig_suite() {
    Outcome o;
    const Report r = run("trig_suite");
    const auto red = matching(r, "reduction identity on singular vectors");
    o.require(static_cast<int>(red.size()) >= kReductionInstances && all_pass(red), "reduction identity");
    const std::string literal = "h = h_λ + ϱ:";
    int bad_dims = 0, n_dims = 0;
    double worst = 0;
    for (const auto* a : matching(r, literal)) {
        if (contains(a->name, "dimensions agree")) {
            ++n_dims;
            if (!a->pass) ++bad_dims;
        }
        if (contains(a->name, "transferred solutions")) worst = std::max(worst, a->detail.value("max_residual", 1.0));
    }
    o.require(n_dims > 0 && bad_dims == 0,
              "with h = h_λ + ϱ dimensions differ on " + std::to_string(bad_dims) + " of " + std::to_string(n_dims) +
                  " targets");
    o.require(worst <= kTrigResidualTol, "transferred residual " + fmt(worst));
    double half = 0;
    int half_bad = 0;
    for (const auto* a : matching(r, "h = ½h_λ + ϱ:")) {
        if (!a->pass) ++half_bad;
        if (contains(a->name, "transferred")) half = std::max(half, a->detail.value("max_residual", 1.0));
    }
    const std::string extra = "; with h = ½h_λ + ϱ: " + std::to_string(half_bad) + " failures, residual " + fmt(half);
    if (o.pass) o.note = "reduction exact on " + std::to_string(red.size()) + " instances, dimensions agree, residual " +
                         fmt(worst);
    o.note += extra;
    return o;
}

// Independent transpose and cell-count versions of μ′ and θ(μ).
Outcome combinatorics() {
    Outcome o;
    std::vector<std::vector<int>> all;
    std::function<void(int, int, std::vector<int>&)> rec = [&](int left, int cap, std::vector<int>& cur) {
        all.push_back(cur);
        for (int v = std::min(left, cap); v >= 1; --v) {
            cur.push_back(v);
            rec(left - v, v, cur);
            cur.pop_back();
        }
    };
    std::vector<int> cur;
    rec(kMaxBoxes, kMaxBoxes, cur);
    for (const auto& parts : all) {
        const superkz::Partition mu(parts);
        std::vector<int> cols;
        std::vector<int> theta(2 * kMaxBoxes + 2, 0);
        int boxes = 0;
        for (int r = 0; r < static_cast<int>(parts.size()); ++r)
            for (int c = 0; c < parts[r]; ++c) {
                if (c >= static_cast<int>(cols.size())) cols.push_back(0);
                ++cols[c];
                ++theta[r >= c ? 2 * c : 2 * r + 1];
                ++boxes;
            }
        const auto conj = superkz::conjugate(mu);
        o.require(conj == superkz::Partition(cols), "conjugate " + mu.str());
        o.require(superkz::conjugate(conj) == mu, "involution " + mu.str());
        const auto th = superkz::frobenius_theta(mu, static_cast<int>(theta.size()));
        o.require(th == theta, "theta " + mu.str());
        int sum = 0;
        for (int v : th) sum += v;
        o.require(sum == boxes, "box count " + mu.str());
    }
    if (o.pass) o.note = std::to_string(all.size()) + " partitions with at most " + std::to_string(kMaxBoxes) + " boxes";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* title;
        Outcome (*check)();
    };
    const Criterion criteria[] = {
        {"scalar identity across series", scalar_identity},
        {"Casimir eigenvalue on Verma modules", casimir_eigenvalue},
        {"Omega from the coproduct of the Casimir element", oc_identity},
        {"Gaudin structure", gaudin_commute},
        {"two-point KZ solutions", kz_two_point},
        {"truncation stability", truncation_stability},
        {"super duality bijections", superduality},
        {"central extension corrections", central_extension},
        {"trigonometric suite", trig_suite},
        {"partition combinatorics", combinatorics},
    };
    int failed = 0, k = 0;
    for (const auto& c : criteria) {
        ++k;
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.note = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failed;
        std::printf("criterion %2d %s  %s: %s\n", k, o.pass ? "PASS" : "FAIL", c.title, o.note.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", k - failed, k);
    return failed == 0 ? 0 : 1;
}
