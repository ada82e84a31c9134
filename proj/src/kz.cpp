#include "superkz/kz.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>

namespace superkz {

namespace {

MatC to_complex(const MatQ& a) { return to_double(a).cast<Cplx>(); }

Cplx to_cplx(const Rational& q) { return Cplx(to_double(q), 0.0); }

}  // namespace

KZSystem rational_system(const TensorModule& t, const std::vector<int>& coords, const Rational& kappa, bool with_k) {
    if (kappa == 0) throw std::invalid_argument("kappa must be nonzero");
    KZSystem s;
    s.variant = KZVariant::Rational;
    s.kappa = kappa;
    s.sites = t.sites();
    s.dim = t.block(coords).dim;
    s.omega.assign(s.sites, std::vector<MatQ>(s.sites));
    for (int i = 0; i < s.sites; ++i)
        for (int j = 0; j < s.sites; ++j)
            if (i != j) s.omega[i][j] = omega_ij(t, i, j, coords, with_k);
    s.cache_doubles();
    return s;
}

KZSystem trig_system(const TensorModule& t, const std::vector<int>& coords, const Rational& kappa, bool with_k,
                     std::vector<MatQ> h) {
    if (kappa == 0) throw std::invalid_argument("kappa must be nonzero");
    KZSystem s;
    s.variant = KZVariant::Trigonometric;
    s.kappa = kappa;
    s.sites = t.sites();
    s.dim = t.block(coords).dim;
    if (static_cast<int>(h.size()) != s.sites) throw std::invalid_argument("trig_system: one h per site required");
    s.h = std::move(h);
    const TrigKernels k = trig_kernels(*t.algebra, with_k);
    s.omega_plus.assign(s.sites, std::vector<MatQ>(s.sites));
    s.omega_minus.assign(s.sites, std::vector<MatQ>(s.sites));
    for (int i = 0; i < s.sites; ++i)
        for (int j = 0; j < s.sites; ++j) {
            if (i == j) continue;
            s.omega_plus[i][j] = apply_bilinear(t, k.plus, i, j, coords);
            s.omega_minus[i][j] = apply_bilinear(t, k.minus, i, j, coords);
        }
    s.cache_doubles();
    return s;
}

void KZSystem::cache_doubles() {
    auto conv = [](const std::vector<std::vector<MatQ>>& a) {
        std::vector<std::vector<MatC>> out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            for (const auto& m : a[i]) out[i].push_back(m.size() ? to_complex(m) : MatC());
        return out;
    };
    omega_c_ = conv(omega);
    plus_c_ = conv(omega_plus);
    minus_c_ = conv(omega_minus);
    h_c_.clear();
    for (const auto& m : h) h_c_.push_back(to_complex(m));
}

MatQ KZSystem::coefficient(int i, const std::vector<Rational>& z) const {
    MatQ a = MatQ::Zero(dim, dim);
    for (int j = 0; j < sites; ++j) {
        if (j == i) continue;
        if (z[i] == z[j]) throw std::invalid_argument("coincident points");
        if (variant == KZVariant::Rational)
            a += omega[i][j] / (z[i] - z[j]);
        else
            a += (z[i] * omega_plus[i][j] + z[j] * omega_minus[i][j]) / (z[i] - z[j]);
    }
    if (variant == KZVariant::Trigonometric) a += h[i];
    return a;
}

MatC KZSystem::coefficient(int i, const Point& z) const {
    MatC a = MatC::Zero(dim, dim);
    for (int j = 0; j < sites; ++j) {
        if (j == i) continue;
        if (variant == KZVariant::Rational)
            a += omega_c_[i][j] / (z[i] - z[j]);
        else
            a += (z[i] * plus_c_[i][j] + z[j] * minus_c_[i][j]) / (z[i] - z[j]);
    }
    if (variant == KZVariant::Trigonometric) a += h_c_[i];
    return a;
}

std::vector<MatQ> KZSystem::coefficient_basis() const {
    std::vector<MatQ> out;
    for (int i = 0; i < sites; ++i) {
        if (variant == KZVariant::Trigonometric) {
            MatQ c = h[i];
            for (int j = 0; j < sites; ++j)
                if (j != i) c -= omega_minus[i][j];
            out.push_back(c);
        }
        for (int j = i + 1; j < sites; ++j) {
            if (variant == KZVariant::Rational)
                out.push_back(omega[i][j]);
            else {
                out.push_back(omega_plus[i][j] + omega_minus[i][j]);
                out.push_back(omega_plus[j][i] + omega_minus[j][i]);
            }
        }
    }
    return out;
}

std::vector<MatQ> h_shift(const TensorModule& t, const std::vector<int>& coords, const Weight& gamma,
                          const Rational& scale, bool plus_varrho, bool with_k) {
    std::vector<MatQ> out;
    for (int i = 0; i < t.sites(); ++i) {
        MatQ m = scale * h_gamma(t, gamma, i, coords, with_k);
        if (plus_varrho) m += rho_site(t, i, coords);
        out.push_back(m);
    }
    return out;
}

namespace {

double segment_min_distance(Cplx a, Cplx b) {
    // min over t ∈ [0,1] of |a + t (b − a)|
    const Cplx d = b - a;
    const double dd = std::norm(d);
    double t = dd == 0 ? 0.0 : -std::real(std::conj(d) * a) / dd;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(a + t * d);
}

void check_segment(const KZSystem& sys, const Point& p, const Point& q, double pole_min) {
    for (int i = 0; i < sys.sites; ++i) {
        for (int j = i + 1; j < sys.sites; ++j) {
            const double dist = segment_min_distance(p[i] - p[j], q[i] - q[j]);
            if (dist < pole_min)
                throw PoleProximity("path passes within " + std::to_string(dist) + " of z_" + std::to_string(i + 1) +
                                    " = z_" + std::to_string(j + 1));
        }
        if (sys.variant == KZVariant::Trigonometric) {
            const double dist = segment_min_distance(p[i], q[i]);
            if (dist < pole_min)
                throw PoleProximity("path passes within " + std::to_string(dist) + " of z_" + std::to_string(i + 1) +
                                    " = 0");
        }
    }
}

}  // namespace

VecC integrate(const KZSystem& sys, const std::vector<Point>& polyline, const VecC& psi0, const TransportOptions& opt) {
    using State = std::vector<Cplx>;
    namespace ode = boost::numeric::odeint;
    State x(psi0.data(), psi0.data() + psi0.size());
    const Cplx inv_kappa = 1.0 / to_cplx(sys.kappa);
    for (std::size_t s = 0; s + 1 < polyline.size(); ++s) {
        const Point& p = polyline[s];
        const Point& q = polyline[s + 1];
        check_segment(sys, p, q, opt.pole_min);
        auto rhs = [&](const State& y, State& dy, double t) {
            Point z(sys.sites);
            for (int i = 0; i < sys.sites; ++i) z[i] = p[i] + t * (q[i] - p[i]);
            Eigen::Map<const VecC> ym(y.data(), static_cast<Eigen::Index>(y.size()));
            VecC acc = VecC::Zero(sys.dim);
            for (int i = 0; i < sys.sites; ++i) {
                const Cplx dz = q[i] - p[i];
                if (dz == Cplx(0)) continue;
                Cplx w = dz * inv_kappa;
                if (sys.variant == KZVariant::Trigonometric) w /= z[i];
                acc += w * (sys.coefficient(i, z) * ym);
            }
            dy.assign(acc.data(), acc.data() + acc.size());
        };
        auto stepper = ode::make_controlled(opt.tol, opt.tol, ode::runge_kutta_dopri5<State, double, State, double>());
        ode::integrate_adaptive(stepper, rhs, x, 0.0, 1.0, 1e-2);
    }
    return Eigen::Map<VecC>(x.data(), static_cast<Eigen::Index>(x.size()));
}

Solution transported_solution(const KZSystem& sys, Point base, VecC psi0, TransportOptions opt) {
    return [&sys, base = std::move(base), psi0 = std::move(psi0), opt](const Point& z) {
        return integrate(sys, {base, z}, psi0, opt);
    };
}

double residual(const KZSystem& sys, const Solution& psi, const Point& z, double h) {
    const VecC v = psi(z);
    const Cplx kappa = to_cplx(sys.kappa);
    double worst = 0;
    for (int i = 0; i < sys.sites; ++i) {
        auto at = [&](double s) {
            Point w = z;
            w[i] += s * h;
            return psi(w);
        };
        VecC d = (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h);
        if (sys.variant == KZVariant::Trigonometric) d *= z[i];
        const VecC r = kappa * d - sys.coefficient(i, z) * v;
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

Cplx cpow(Cplx z, double a) {
    if (a == 0) return 1.0;
    return std::exp(a * std::log(z));
}

Rational ell2_exponent(const Weight& mu, const Weight& l1, const Weight& l2, const RhoData& rho) {
    return (casimir_scalar(mu, rho) - casimir_scalar(l1, rho) - casimir_scalar(l2, rho)) / 2;
}

Solution ell2_solution(const VecC& v, const Rational& omega, const Rational& kappa) {
    const double e = to_double(omega / kappa);
    return [v, e](const Point& z) -> VecC { return cpow(z[0] - z[1], e) * v; };
}

Solution trig_ell2_solution(const VecC& v, const Rational& omega, const Rational& c1, const Rational& c2,
                            const Rational& kappa) {
    const double e = to_double(omega / kappa);
    const double a1 = to_double(c1 / (2 * kappa)), a2 = to_double(c2 / (2 * kappa));
    return [v, e, a1, a2](const Point& z) -> VecC { return cpow(z[0] - z[1], e) * cpow(z[0], a1) * cpow(z[1], a2) * v; };
}

std::optional<Rational> scalar_action(const MatQ& op, const MatQ& basis) {
    if (basis.cols() == 0) return std::nullopt;
    const MatQ img = op * basis;
    for (int c = 0; c < basis.cols(); ++c)
        for (int r = 0; r < basis.rows(); ++r)
            if (basis(r, c) != 0) {
                const Rational s = img(r, c) / basis(r, c);
                if (img == s * basis) return s;
                return std::nullopt;
            }
    return std::nullopt;
}

MatQ invariant_subspace(const MatQ& s, const std::vector<MatQ>& ops) {
    MatQ w = column_basis(s);
    const int dim = static_cast<int>(s.rows());
    while (w.cols() > 0) {
        Reduction red = reduction(w, dim);
        MatQ stack(0, w.cols());
        for (const auto& op : ops)
            if (!red.keep.empty()) stack = vstack(stack, red.project * op * w);
        MatQ n = nullspace(stack);
        if (n.cols() == w.cols()) break;
        w = column_basis(w * n);
    }
    return w;
}

int singular_solution_dimension(const KZSystem& sys, const MatQ& singular) {
    return static_cast<int>(invariant_subspace(singular, sys.coefficient_basis()).cols());
}

Cplx correction_factor(Series s, int n, const std::vector<Rational>& d, const Rational& kappa, const Point& z,
                       bool trig) {
    if (s == Series::Tilde) return 1.0;
    const int sign = s == Series::Plain ? -1 : 1;
    Rational total = 0;
    for (const auto& x : d) total += x;
    Cplx f = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j)
            f *= cpow(z[i] - z[j], to_double(sign * n * d[i] * d[j] / kappa));
    if (trig)
        for (std::size_t r = 0; r < d.size(); ++r)
            f *= cpow(z[r], to_double(-sign * n * d[r] * (total - d[r]) / (2 * kappa)));
    return f;
}

MatQ block_embedding(const TensorModule& from, const std::vector<int>& cf, const TensorModule& to,
                     const std::vector<int>& ct) {
    const TensorBlock& fb = from.block(cf);
    const TensorBlock& tb = to.block(ct);
    if (!(fb.weight == tb.weight)) throw std::invalid_argument("block_embedding: weights differ");
    MatQ p = MatQ::Zero(tb.dim, fb.dim);
    for (std::size_t ci = 0; ci < fb.combos.size(); ++ci) {
        std::vector<int> mapped;
        int size = 1;
        for (int s = 0; s < from.sites(); ++s) {
            const Block& b = from.factors[s]->blocks[fb.combos[ci][s]];
            const int t = to.factors[s]->find_block(b.weight);
            if (t < 0 || to.factors[s]->blocks[t].dim != b.dim)
                throw std::invalid_argument("block_embedding: factor block mismatch at " + b.weight.str());
            mapped.push_back(t);
            size *= b.dim;
        }
        auto it = tb.combo_index.find(mapped);
        if (it == tb.combo_index.end()) throw std::invalid_argument("block_embedding: combination missing");
        const int toff = tb.offsets[it->second];
        for (int k = 0; k < size; ++k) p(toff + k, fb.offsets[ci] + k) = 1;
    }
    return p;
}

TransferMaps transfer_maps(const WeightModule& v, const Weight& target, int max_degree) {
    const AlgebraInstance& g = *v.algebra;
    auto c = v.coords_of(target);
    if (!c) throw SearchExhausted("transfer_maps: target weight outside the root lattice");
    for (int x : *c)
        if (x < 0) throw SearchExhausted("transfer_maps: target weight is not below the highest weight");
    TransferMaps out;
    bool trivial = true;
    for (int x : *c) trivial = trivial && x == 0;
    if (trivial) return out;

    std::vector<int> levi;
    for (int r = 0; r < g.num_roots(); ++r)
        if (g.roots[r].levi) levi.push_back(r);
    const int h = v.find_block(v.hw);
    const MatQ one = MatQ::Ones(1, 1);
    auto back_to_top = [&](const Word& x, int blk, const MatQ& vec) -> Rational {
        auto [b2, res] = apply_word(v, x, blk, vec);
        if (b2 != h) return 0;
        return res(0, 0);
    };
    const auto raising_words = pbw_words(g, levi, false, *c, max_degree);
    for (const Word& y : pbw_words(g, levi, true, *c, max_degree)) {
        auto [blk, vec] = apply_word(v, y, h, one);
        if (blk < 0 || vec.isZero()) continue;
        Word sigma;
        for (auto it = y.rbegin(); it != y.rend(); ++it) sigma.push_back(g.roots[g.basis[*it].slot].raising);
        Rational s = back_to_top(sigma, blk, vec);
        if (s != 0) return {y, sigma, s};
        for (const Word& x : raising_words) {
            s = back_to_top(x, blk, vec);
            if (s != 0) return {y, x, s};
        }
    }
    throw SearchExhausted("transfer_maps: no monomial pair up to degree " + std::to_string(max_degree));
}

int compute_k0(const Weight& mu_bar) {
    Rational k = 0;
    for (const auto& [l, v] : mu_bar.eps)
        if (l.twice > 0 && !l.barred) k += v;
    if (!is_integer(k) || k < 0) throw std::invalid_argument("compute_k0: weight coefficients must sum to a nonnegative integer");
    return static_cast<int>(to_long(k));
}

}  // namespace superkz
