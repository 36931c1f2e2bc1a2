#pragma once

// Truncated power series in three orbifold coordinates with Novikov-field
// coefficients.  Series are sparse maps monomial -> coefficient; precision
// lives in the coefficients themselves.

#include "orb/novikov.hpp"

#include <array>
#include <functional>
#include <map>

namespace orb {

enum class VariableFrame { xyz, tilde };

inline std::string frame_str(VariableFrame f) {
    return f == VariableFrame::xyz ? "xyz" : "tilde";
}

struct Monomial {
    int i = 0, j = 0, k = 0;

    int deg() const { return i + j + k; }
    int exp(int v) const { return v == 0 ? i : v == 1 ? j : k; }
    int& exp(int v) { return v == 0 ? i : v == 1 ? j : k; }

    Monomial plus(int v, int d) const {
        Monomial m = *this;
        m.exp(v) += d;
        return m;
    }
    bool divisible_by(const Monomial& o) const {
        return i >= o.i && j >= o.j && k >= o.k;
    }
    Monomial operator*(const Monomial& o) const { return {i + o.i, j + o.j, k + o.k}; }
    Monomial operator/(const Monomial& o) const { return {i - o.i, j - o.j, k - o.k}; }

    auto operator<=>(const Monomial&) const = default;

    std::string str() const {
        if (deg() == 0) return "1";
        std::string s;
        const char* names[3] = {"x", "y", "z"};
        int e[3] = {i, j, k};
        for (int v = 0; v < 3; ++v) {
            if (e[v] == 0) continue;
            if (!s.empty()) s += "*";
            s += names[v];
            if (e[v] > 1) s += "^" + std::to_string(e[v]);
        }
        return s;
    }
};

struct TateSeries {
    std::map<Monomial, Novikov> c;

    static TateSeries zero() { return {}; }
    static TateSeries var(int v) {
        TateSeries s;
        s.c[Monomial{}.plus(v, 1)] = Novikov::one();
        return s;
    }
    static TateSeries mono(const Monomial& m, const Novikov& a) {
        TateSeries s;
        if (!a.is_exact_zero()) s.c[m] = a;
        return s;
    }
    static TateSeries constant(const Novikov& a) { return mono(Monomial{}, a); }
    static TateSeries one() { return constant(Novikov::one()); }

    void prune() {
        for (auto it = c.begin(); it != c.end();)
            it = it->second.is_exact_zero() ? c.erase(it) : std::next(it);
    }

    bool is_zero() const {
        for (auto& [m, a] : c)
            if (!a.is_exact_zero()) return false;
        return true;
    }

    int degree() const {
        int d = -1;
        for (auto& [m, a] : c)
            if (!a.is_exact_zero()) d = std::max(d, m.deg());
        return d;
    }

    Novikov coeff(const Monomial& m) const {
        auto it = c.find(m);
        return it == c.end() ? Novikov::zero() : it->second;
    }

    // Minimum coefficient valuation lower bound over all terms (+inf if none).
    std::optional<Rational> min_val_lower() const {
        std::optional<Rational> v;
        for (auto& [m, a] : c) {
            if (a.is_exact_zero()) continue;
            v = opt_min(v, a.val_lower());
        }
        return v;
    }

    TateSeries operator+(const TateSeries& o) const {
        TateSeries r = *this;
        for (auto& [m, a] : o.c) {
            auto it = r.c.find(m);
            if (it == r.c.end())
                r.c[m] = a;
            else
                it->second = it->second + a;
        }
        r.prune();
        return r;
    }
    TateSeries operator-() const {
        TateSeries r = *this;
        for (auto& [m, a] : r.c) a = -a;
        return r;
    }
    TateSeries operator-(const TateSeries& o) const { return *this + (-o); }

    TateSeries operator*(const TateSeries& o) const {
        TateSeries r;
        for (auto& [ma, aa] : c)
            for (auto& [mb, ab] : o.c) {
                Novikov p = aa * ab;
                if (p.is_exact_zero()) continue;
                Monomial m = ma * mb;
                auto it = r.c.find(m);
                if (it == r.c.end())
                    r.c[m] = p;
                else
                    it->second = it->second + p;
            }
        r.prune();
        return r;
    }

    TateSeries scaled(const Novikov& a) const {
        TateSeries r;
        for (auto& [m, cc] : c) {
            Novikov p = cc * a;
            if (!p.is_exact_zero()) r.c[m] = p;
        }
        return r;
    }

    TateSeries truncated(const Rational& p) const {
        TateSeries r;
        for (auto& [m, a] : c) {
            Novikov t = a.truncated(p);
            if (!t.is_exact_zero()) r.c[m] = t;
        }
        return r;
    }

    // Drop monomials of total degree > D; the dropped terms must carry
    // valuation >= N or the truncation is uncertified.
    TateSeries degree_truncated(int D, const Rational& N) const {
        TateSeries r;
        for (auto& [m, a] : c) {
            if (m.deg() <= D) {
                r.c[m] = a;
                continue;
            }
            auto lv = a.val_lower();
            if (lv && *lv < N)
                throw CapViolation("degree cap " + std::to_string(D) +
                                   " drops term " + m.str() + " of valuation T^" +
                                   rational_str(*lv));
        }
        return r;
    }

    // Coefficient-wise agreement below T^upto; every differing coefficient
    // must carry at least that much precision.
    bool agrees_with(const TateSeries& o, const Rational& upto) const {
        TateSeries d = *this - o;
        for (auto& [m, a] : d.c) {
            if (a.prec && *a.prec < upto) return false;
            if (!a.truncated(upto).terms.empty()) return false;
        }
        return true;
    }

    std::string str() const {
        std::string s;
        for (auto& [m, a] : c) {
            if (!s.empty()) s += "  +  ";
            s += "(" + a.str() + ")*" + m.str();
        }
        return s.empty() ? "0" : s;
    }
};

inline TateSeries partial(const TateSeries& P, int v) {
    TateSeries r;
    for (auto& [m, a] : P.c) {
        int e = m.exp(v);
        if (e == 0) continue;
        r.c[m.plus(v, -1)] = r.coeff(m.plus(v, -1)) + a.scaled(Rational(e));
    }
    r.prune();
    return r;
}

// T d/dT applied coefficient-wise: c T^e -> c e T^e.
inline TateSeries t_derivative(const TateSeries& P) {
    TateSeries r;
    for (auto& [m, a] : P.c) {
        Novikov b;
        b.prec = a.prec;
        for (auto& [e, cc] : a.terms)
            if (e != 0) b.terms.emplace_back(e, cc * e);
        b.normalize();
        if (!b.is_exact_zero()) r.c[m] = b;
    }
    return r;
}

// Frame change x = T^3 x~ (and cyclically): a coefficient of the degree-d
// monomial picks up T^{+3d} going to the tilde frame and T^{-3d} coming back.
inline TateSeries to_tilde(const TateSeries& P) {
    TateSeries r;
    for (auto& [m, a] : P.c) r.c[m] = a.shifted(Rational(3 * m.deg()));
    return r;
}
inline TateSeries from_tilde(const TateSeries& P) {
    TateSeries r;
    for (auto& [m, a] : P.c) r.c[m] = a.shifted(Rational(-3 * m.deg()));
    return r;
}

namespace detail {

// A substituent is admissible when it is either a constant of valuation >= 0
// (point evaluation) or a coordinate change c*x_v + u with c a unit of
// valuation 0 and every other coefficient of positive valuation.
inline void check_substituent(const TateSeries& S, int v) {
    bool constant_only = true;
    for (auto& [m, a] : S.c)
        if (m.deg() > 0 && !a.is_exact_zero()) constant_only = false;
    if (constant_only) {
        for (auto& [m, a] : S.c) {
            auto lv = a.val_lower();
            if (lv && *lv < 0)
                throw DivergentSubstitution("point coordinate has valuation T^" +
                                            rational_str(*lv) + " < 0");
        }
        return;
    }
    Monomial self = Monomial{}.plus(v, 1);
    for (auto& [m, a] : S.c) {
        if (a.is_exact_zero()) continue;
        if (m == self) {
            if (a.terms.empty() || a.val() != 0)
                throw DivergentSubstitution("linear part of substituent " +
                                            std::to_string(v) + " is not a unit");
            continue;
        }
        auto lv = a.val_lower();
        if (!a.terms.empty() && a.val() <= 0)
            throw DivergentSubstitution("substituent tail term " + m.str() +
                                        " has valuation <= 0");
        (void)lv;
    }
}

}  // namespace detail

// P(Sx, Sy, Sz).  Validates the substituents per the convergence contract and
// expands through cached powers.
inline TateSeries substitute(const TateSeries& P, const TateSeries& Sx,
                             const TateSeries& Sy, const TateSeries& Sz) {
    const TateSeries* S[3] = {&Sx, &Sy, &Sz};
    for (int v = 0; v < 3; ++v) detail::check_substituent(*S[v], v);
    std::array<std::vector<TateSeries>, 3> pw;
    for (int v = 0; v < 3; ++v) pw[v].push_back(TateSeries::one());
    auto power = [&](int v, int e) -> const TateSeries& {
        while ((int)pw[v].size() <= e) pw[v].push_back(pw[v].back() * (*S[v]));
        return pw[v][e];
    };
    TateSeries r;
    for (auto& [m, a] : P.c) {
        TateSeries t = TateSeries::constant(a);
        t = t * power(0, m.i);
        t = t * power(1, m.j);
        t = t * power(2, m.k);
        r = r + t;
    }
    return r;
}

// 1/P for P = u*(1 + Q) with u an invertible constant term and val(Q) > 0.
inline TateSeries invert_unit(const TateSeries& P, const Rational& cap = kWorkPrec) {
    Novikov u0 = P.coeff(Monomial{});
    if (u0.terms.empty()) throw NotInvertible("series has no invertible constant term");
    Novikov u0inv = nov_invert(u0, cap);
    TateSeries Q = P.scaled(u0inv) - TateSeries::one();
    Q = Q.truncated(cap);
    auto qv = Q.min_val_lower();
    if (qv && *qv <= 0)
        throw NotInvertible("non-unit series: tail valuation T^" + rational_str(*qv));
    TateSeries sum = TateSeries::one().truncated(cap);
    TateSeries qpow = sum;
    if (qv) {
        for (Rational kv = *qv; kv < cap; kv += *qv) {
            qpow = (qpow * (-Q)).truncated(cap);
            if (qpow.is_zero()) break;
            sum = sum + qpow;
        }
    }
    return sum.scaled(u0inv).truncated(cap);
}

// Evaluate P at a triple of scalars over an arbitrary coefficient ring C,
// embedding the rational Novikov coefficients along `embed`.
template <class C>
BasicNovikov<C> tate_eval(const TateSeries& P, const BasicNovikov<C>& ax,
                          const BasicNovikov<C>& ay, const BasicNovikov<C>& az) {
    auto embed = [](const Novikov& a) {
        BasicNovikov<C> r;
        r.prec = a.prec;
        for (auto& [e, cc] : a.terms) r.terms.emplace_back(e, C(cc));
        return r;
    };
    BasicNovikov<C> r;
    std::array<std::vector<BasicNovikov<C>>, 3> pw;
    const BasicNovikov<C>* A[3] = {&ax, &ay, &az};
    for (int v = 0; v < 3; ++v) pw[v].push_back(BasicNovikov<C>::one());
    auto power = [&](int v, int e) -> const BasicNovikov<C>& {
        while ((int)pw[v].size() <= e) pw[v].push_back(pw[v].back() * (*A[v]));
        return pw[v][e];
    };
    for (auto& [m, a] : P.c) {
        BasicNovikov<C> t = embed(a);
        t = t * power(0, m.i) * power(1, m.j) * power(2, m.k);
        r = r + t;
    }
    return r;
}

}  // namespace orb
