#pragma once

// Coordinate changes x_v -> c_v x_v + u_v (c_v a nonzero rational, u_v a
// series tail of positive valuation) as first-class objects, plus the
// non-archimedean Picard flow integrator for vector fields polynomial in the
// flow parameter s, with its contraction certificate.

#include "orb/jacobian.hpp"
#include "orb/tate.hpp"

#include <array>

namespace orb {

struct CoordinateChange {
    std::array<Rational, 3> c{1, 1, 1};
    std::array<TateSeries, 3> u;  // val > 0

    TateSeries substituent(int v) const {
        return TateSeries::mono(Monomial{}.plus(v, 1), Novikov::constant(c[v])) + u[v];
    }
};

inline void validate_cc(const CoordinateChange& cc) {
    for (int v = 0; v < 3; ++v) {
        if (cc.c[v] == 0) throw NotInvertible("coordinate change with c = 0");
        auto lv = cc.u[v].min_val_lower();
        if (lv && *lv <= 0)
            throw PositiveValuationRequired("coordinate-change tail has valuation T^" +
                                            rational_str(*lv));
    }
}

inline CoordinateChange identity_cc() { return {}; }

namespace detail {

// Truncate and drop pure big-O placeholders.  Iterative schemes in this
// header certify their output globally (modulo T^cap by construction), so a
// term-free O(T^p) coefficient carries no information and only inflates the
// monomial support of products.
inline TateSeries tidy_mod(const TateSeries& P, const Rational& cap) {
    TateSeries r = P.truncated(cap);
    for (auto it = r.c.begin(); it != r.c.end();)
        it = it->second.terms.empty() ? r.c.erase(it) : std::next(it);
    return r;
}

}  // namespace detail

inline TateSeries apply(const CoordinateChange& cc, const TateSeries& P) {
    validate_cc(cc);
    return substitute(P, cc.substituent(0), cc.substituent(1), cc.substituent(2));
}

// Orientation: apply(compose(f,g), P) = apply(g, apply(f, P)); the composite
// substituent is f's substituent with g substituted into its variables.
inline CoordinateChange compose(const CoordinateChange& f, const CoordinateChange& g) {
    validate_cc(f);
    validate_cc(g);
    CoordinateChange r;
    for (int v = 0; v < 3; ++v) {
        TateSeries S = substitute(f.substituent(v), g.substituent(0), g.substituent(1),
                                  g.substituent(2));
        r.c[v] = f.c[v] * g.c[v];
        r.u[v] = S - TateSeries::mono(Monomial{}.plus(v, 1), Novikov::constant(r.c[v]));
    }
    validate_cc(r);
    return r;
}

// Two-sided inverse modulo T^cap by Banach fixed-point iteration: the update
// S_v <- (x_v - u_v(S)) / c_v gains at least the tail valuation per pass.
inline CoordinateChange invert(const CoordinateChange& f, const Rational& cap = kAssertPrec) {
    validate_cc(f);
    std::optional<Rational> eps;
    for (int v = 0; v < 3; ++v) eps = opt_min(eps, f.u[v].min_val_lower());
    CoordinateChange r;
    for (int v = 0; v < 3; ++v) r.c[v] = 1 / f.c[v];
    if (!eps) return r;  // linear change, exact inverse
    Rational ratio = cap / *eps;
    Integer passes_i = numerator(ratio) / denominator(ratio) + 2;  // >= ceil + 1
    long passes = static_cast<long>(passes_i);
    std::array<TateSeries, 3> S;
    for (int v = 0; v < 3; ++v) S[v] = r.substituent(v);
    for (long k = 0; k < passes; ++k) {
        // the error after pass k is O(T^{(k+1)eps}); a progressive cap keeps
        // the transient junk beyond it from inflating the iterates
        Rational cap_k = Rational(k + 2) * *eps;
        if (cap < cap_k) cap_k = cap;
        bool stable = true;
        for (int v = 0; v < 3; ++v) {
            TateSeries t = substitute(f.u[v], S[0], S[1], S[2]);
            TateSeries next = (TateSeries::var(v) - t).scaled(Novikov::constant(1 / f.c[v]));
            next = detail::tidy_mod(next, cap_k);
            if (!(next - S[v]).is_zero()) stable = false;
            S[v] = next;
        }
        if (stable && cap_k == cap) break;
    }
    for (int v = 0; v < 3; ++v)
        r.u[v] = S[v] - TateSeries::mono(Monomial{}.plus(v, 1), Novikov::constant(r.c[v]));
    validate_cc(r);
    return r;
}

// Flatten a series back into a potential container (used for functoriality
// checks on transformed potentials; areas do not survive a general change).
inline PotentialSpec potential_from_series(const TateSeries& P, const OrbifoldData& o) {
    PotentialSpec W;
    W.orb = o;
    W.degree_cap = std::max(P.degree(), (int)std::max({o.a, o.b, o.c}) + 6);
    std::optional<Rational> prec;
    for (auto& [m, a] : P.c) {
        for (auto& [e, cc] : a.terms) W.terms.push_back({m, e, cc, std::nullopt});
        prec = opt_min(prec, a.prec);
    }
    W.t_precision = prec;
    return W;
}

// --- polynomials in the flow parameter s ---------------------------------

struct SPoly {
    std::vector<TateSeries> a;  // a[k] is the coefficient of s^k

    static SPoly from(TateSeries P) {
        SPoly r;
        r.a.push_back(std::move(P));
        return r;
    }

    void trim() {
        while (!a.empty() && a.back().is_zero()) a.pop_back();
    }

    TateSeries coeff(size_t k) const { return k < a.size() ? a[k] : TateSeries(); }

    SPoly operator+(const SPoly& o) const {
        SPoly r;
        r.a.resize(std::max(a.size(), o.a.size()));
        for (size_t k = 0; k < r.a.size(); ++k) r.a[k] = coeff(k) + o.coeff(k);
        r.trim();
        return r;
    }
    SPoly operator-() const {
        SPoly r = *this;
        for (auto& t : r.a) t = -t;
        return r;
    }
    SPoly operator-(const SPoly& o) const { return *this + (-o); }
    SPoly operator*(const SPoly& o) const {
        SPoly r;
        if (a.empty() || o.a.empty()) return r;
        r.a.resize(a.size() + o.a.size() - 1);
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < o.a.size(); ++j) r.a[i + j] = r.a[i + j] + a[i] * o.a[j];
        r.trim();
        return r;
    }

    // truncation modulo T^p, dropping term-free big-O coefficients (flow
    // results are certified globally at their precision)
    SPoly truncated(const Rational& p) const;

    // integral from 0 in s
    SPoly s_integral() const {
        SPoly r;
        r.a.resize(a.size() + 1);
        for (size_t k = 0; k < a.size(); ++k)
            r.a[k + 1] = a[k].scaled(Novikov::constant(Rational(1, (long)k + 1)));
        r.trim();
        return r;
    }
    SPoly s_derivative() const {
        SPoly r;
        for (size_t k = 1; k < a.size(); ++k)
            r.a.push_back(a[k].scaled(Novikov::constant(Rational((long)k))));
        r.trim();
        return r;
    }

    TateSeries at(const Rational& s) const {
        TateSeries r;
        Rational p = 1;
        for (auto& t : a) {
            r = r + t.scaled(Novikov::constant(p));
            p *= s;
        }
        return r;
    }

    std::optional<Rational> min_val_lower() const {
        std::optional<Rational> v;
        for (auto& t : a) v = opt_min(v, t.min_val_lower());
        return v;
    }
};

inline SPoly SPoly::truncated(const Rational& p) const {
    SPoly r;
    for (auto& t : a) r.a.push_back(detail::tidy_mod(t, p));
    r.trim();
    return r;
}

// P(Phi_x, Phi_y, Phi_z) for an s-polynomial triple of substituents.
inline SPoly subst_spoly(const TateSeries& P, const std::array<SPoly, 3>& S) {
    std::array<std::vector<SPoly>, 3> pw;
    for (int v = 0; v < 3; ++v) pw[v].push_back(SPoly::from(TateSeries::one()));
    auto power = [&](int v, int e) -> const SPoly& {
        while ((int)pw[v].size() <= e) pw[v].push_back(pw[v].back() * S[v]);
        return pw[v][e];
    };
    SPoly r;
    for (auto& [m, c] : P.c) {
        SPoly t = SPoly::from(TateSeries::constant(c));
        t = t * power(0, m.i) * power(1, m.j) * power(2, m.k);
        r = r + t;
    }
    return r;
}

struct VectorFieldS {
    std::array<SPoly, 3> A;  // coefficient of d/dx_v
    Rational eps = 0;        // certified lower bound for all coefficient valuations
};

inline void validate_field(const VectorFieldS& X) {
    if (!(X.eps > 0)) throw PositiveValuationRequired("vector field needs eps > 0");
    for (auto& comp : X.A) {
        auto lv = comp.min_val_lower();
        if (lv && *lv < X.eps)
            throw PositiveValuationRequired("field coefficient valuation T^" +
                                            rational_str(*lv) + " below eps");
    }
}

// A_v evaluated along an s-polynomial point, as an s-polynomial.
inline std::array<SPoly, 3> field_along(const VectorFieldS& X,
                                        const std::array<SPoly, 3>& S) {
    std::array<SPoly, 3> r;
    for (int v = 0; v < 3; ++v) {
        for (size_t k = 0; k < X.A[v].a.size(); ++k) {
            SPoly term = subst_spoly(X.A[v].a[k], S);
            SPoly shift;  // multiply by s^k
            shift.a.assign(k + 1, TateSeries());
            shift.a[k] = TateSeries::one();
            r[v] = r[v] + term * shift;
        }
    }
    return r;
}

struct FlowResult {
    std::array<SPoly, 3> phi;          // phi_v(s; x,y,z) with phi(0) = id
    std::vector<Rational> contraction;  // val(phi^k - phi^{k-1}) lower bounds
    Rational precision;
    long iterations = 0;
};

// Picard iteration phi^{k+1} = id + int_0^s X(u, phi^k) du.  The difference
// of consecutive iterates gains at least eps per step, so k*eps >= precision
// terminates; each recorded bound is checked against the k*eps ledger.
inline FlowResult picard_flow(const VectorFieldS& X, const Rational& precision) {
    validate_field(X);
    FlowResult R;
    R.precision = precision;
    std::array<SPoly, 3> phi;
    for (int v = 0; v < 3; ++v) phi[v] = SPoly::from(TateSeries::var(v));
    long k = 0;
    while (Rational(k) * X.eps < precision) {
        ++k;
        auto Aphi = field_along(X, phi);
        std::array<SPoly, 3> next;
        std::optional<Rational> diff;
        for (int v = 0; v < 3; ++v) {
            next[v] = (SPoly::from(TateSeries::var(v)) + Aphi[v].s_integral())
                          .truncated(precision);
            diff = opt_min(diff, (next[v] - phi[v]).min_val_lower());
        }
        if (diff) {
            if (*diff < Rational(k) * X.eps)
                throw HypothesisViolated("contraction bound failed at step " +
                                         std::to_string(k) + ": T^" +
                                         rational_str(*diff));
            R.contraction.push_back(*diff);
        } else {
            R.contraction.push_back(precision);  // exact fixed point
            phi = next;
            break;
        }
        phi = next;
    }
    // the fixed point satisfies the integral equation modulo T^precision
    auto Aphi = field_along(X, phi);
    for (int v = 0; v < 3; ++v) {
        SPoly rhs = SPoly::from(TateSeries::var(v)) + Aphi[v].s_integral();
        SPoly d = phi[v] - rhs;
        auto lv = d.min_val_lower();
        if (lv && *lv < precision)
            throw HypothesisViolated("integral equation fails at T^" + rational_str(*lv));
    }
    R.phi = phi;
    R.iterations = k;
    return R;
}

struct InvarianceReport {
    bool pass = false;
    Rational precision;
    std::optional<Rational> worst;  // lowest valuation of an s-dependent term
};

// Checks X.G + dG/ds = 0 (else HypothesisViolated), flows, and asserts that
// G(s, phi_s(.)) is independent of s modulo T^precision.
inline InvarianceReport flow_invariance_check(const SPoly& G, const VectorFieldS& X,
                                              const Rational& precision) {
    validate_field(X);
    SPoly lie;
    for (int v = 0; v < 3; ++v) {
        SPoly dG;
        for (auto& t : G.a) dG.a.push_back(partial(t, v));
        dG.trim();
        lie = lie + X.A[v] * dG;
    }
    SPoly defect = lie + G.s_derivative();
    auto dv = defect.min_val_lower();
    if (dv && *dv < precision)
        throw HypothesisViolated("X.G + dG/ds has a term at T^" + rational_str(*dv));

    auto flow = picard_flow(X, precision);
    SPoly comp;
    for (size_t k = 0; k < G.a.size(); ++k) {
        SPoly term = subst_spoly(G.a[k], flow.phi);
        SPoly shift;
        shift.a.assign(k + 1, TateSeries());
        shift.a[k] = TateSeries::one();
        comp = comp + term * shift;
    }
    InvarianceReport rep;
    rep.precision = precision;
    rep.pass = true;
    for (size_t k = 1; k < comp.a.size(); ++k) {
        auto lv = comp.a[k].min_val_lower();
        if (lv && *lv < precision) {
            rep.pass = false;
            rep.worst = opt_min(rep.worst, lv);
        }
    }
    return rep;
}

}  // namespace orb
