#pragma once

// Elements of the Novikov field with exact rational exponents and per-element
// precision caps.  An element is a finite sorted term list c_0 T^{e_0} + ... +
// c_{n-1} T^{e_{n-1}} together with an optional cap p meaning "+ O(T^p)".
// A missing cap means the element is exact.

#include "orb/errors.hpp"
#include "orb/rational.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

namespace orb {

// Default absolute working precision and the tighter precision used by
// assertion helpers.
inline const Rational kWorkPrec = 400;
inline const Rational kAssertPrec = 300;

inline bool coeff_is_zero(const Rational& c) { return c == 0; }
inline Rational coeff_inv(const Rational& c) {
    if (c == 0) throw NotInvertible("division by zero coefficient");
    return 1 / c;
}
inline std::string coeff_str(const Rational& c) { return rational_str(c); }

template <class C>
struct BasicNovikov {
    using Coeff = C;

    std::vector<std::pair<Rational, C>> terms;  // sorted by exponent, no zeros, all < prec
    std::optional<Rational> prec;               // nullopt = exact

    BasicNovikov() = default;

    static BasicNovikov zero() { return BasicNovikov(); }
    static BasicNovikov zero_to(const Rational& p) {
        BasicNovikov r;
        r.prec = p;
        return r;
    }
    static BasicNovikov term(const C& c, const Rational& e) {
        BasicNovikov r;
        if (!coeff_is_zero(c)) r.terms.emplace_back(e, c);
        return r;
    }
    static BasicNovikov constant(const C& c) { return term(c, 0); }
    static BasicNovikov one() { return constant(C(1)); }
    static BasicNovikov t_power(const Rational& e) { return term(C(1), e); }

    bool is_exact_zero() const { return terms.empty() && !prec; }
    bool has_terms() const { return !terms.empty(); }

    // Determinate valuation when the term list is nonempty; exact zero has
    // valuation +infinity (nullopt); an empty list under a finite cap is
    // indeterminate and throws.
    std::optional<Rational> val_opt() const {
        if (!terms.empty()) return terms.front().first;
        if (!prec) return std::nullopt;
        throw IndeterminateValuation("valuation of O(T^" + rational_str(*prec) +
                                     ") is indeterminate");
    }
    Rational val() const {
        auto v = val_opt();
        if (!v) throw IndeterminateValuation("valuation of exact zero");
        return *v;
    }
    // Lower bound for the valuation that is always available.
    std::optional<Rational> val_lower() const {
        if (!terms.empty()) {
            if (prec) return std::min(terms.front().first, *prec);
            return terms.front().first;
        }
        return prec ? std::optional<Rational>(*prec) : std::nullopt;  // nullopt = +inf
    }

    const C& leading_coeff() const {
        if (terms.empty()) throw IndeterminateValuation("leading coefficient of zero");
        return terms.front().second;
    }

    C coeff_at(const Rational& e) const {
        for (auto& [ee, c] : terms)
            if (ee == e) return c;
        return C(0);
    }

    void normalize() {
        std::sort(terms.begin(), terms.end(),
                  [](auto& a, auto& b) { return a.first < b.first; });
        std::vector<std::pair<Rational, C>> out;
        for (auto& [e, c] : terms) {
            if (prec && e >= *prec) continue;
            if (!out.empty() && out.back().first == e) {
                out.back().second = out.back().second + c;
            } else {
                out.emplace_back(e, c);
            }
        }
        out.erase(std::remove_if(out.begin(), out.end(),
                                 [](auto& t) { return coeff_is_zero(t.second); }),
                  out.end());
        terms = std::move(out);
    }

    BasicNovikov truncated(const Rational& p) const {
        BasicNovikov r = *this;
        r.prec = opt_min(r.prec, p);
        r.normalize();
        return r;
    }

    BasicNovikov operator-() const {
        BasicNovikov r = *this;
        for (auto& [e, c] : r.terms) c = -c;
        return r;
    }

    BasicNovikov operator+(const BasicNovikov& o) const {
        BasicNovikov r;
        r.prec = opt_min(prec, o.prec);
        r.terms = terms;
        r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
        r.normalize();
        return r;
    }
    BasicNovikov operator-(const BasicNovikov& o) const { return *this + (-o); }

    BasicNovikov operator*(const BasicNovikov& o) const {
        // Exact zero annihilates regardless of the other operand.
        if (is_exact_zero() || o.is_exact_zero()) return zero();
        // Big-O only operands still give a determinate bound.
        std::optional<Rational> p;
        if (terms.empty() || o.terms.empty()) {
            std::optional<Rational> va = terms.empty() ? prec : std::optional<Rational>(val());
            std::optional<Rational> vb = o.terms.empty() ? o.prec : std::optional<Rational>(o.val());
            return zero_to(*va + *vb);
        }
        p = opt_min(opt_add(prec, o.val()), opt_add(o.prec, val()));
        BasicNovikov r;
        r.prec = p;
        std::map<Rational, C> acc;
        for (auto& [ea, ca] : terms)
            for (auto& [eb, cb] : o.terms) {
                Rational e = ea + eb;
                if (p && e >= *p) continue;
                auto it = acc.find(e);
                if (it == acc.end())
                    acc.emplace(e, ca * cb);
                else
                    it->second = it->second + ca * cb;
            }
        for (auto& [e, c] : acc)
            if (!coeff_is_zero(c)) r.terms.emplace_back(e, c);
        return r;
    }

    BasicNovikov scaled(const C& c) const {
        BasicNovikov r = *this;
        for (auto& [e, cc] : r.terms) cc = cc * c;
        r.normalize();
        return r;
    }
    BasicNovikov shifted(const Rational& e) const {
        BasicNovikov r = *this;
        for (auto& [ee, c] : r.terms) ee += e;
        if (r.prec) *r.prec += e;
        return r;
    }

    bool operator==(const BasicNovikov& o) const {
        return terms == o.terms && prec == o.prec;
    }

    // True when this and o agree term-for-term below T^upto and both carry at
    // least that much precision.
    bool agrees_with(const BasicNovikov& o, const Rational& upto) const {
        if (prec && *prec < upto) return false;
        if (o.prec && *o.prec < upto) return false;
        auto d = (*this - o).truncated(upto);
        return d.terms.empty();
    }

    std::string str() const {
        std::ostringstream os;
        bool first = true;
        for (auto& [e, c] : terms) {
            if (!first) os << " + ";
            first = false;
            os << coeff_str(c) << "*T^(" << rational_str(e) << ")";
        }
        if (prec) {
            if (!first) os << " + ";
            os << "O(T^(" << rational_str(*prec) << "))";
            first = false;
        }
        if (first) os << "0";
        return os.str();
    }
};

// --- series helpers ------------------------------------------------------

template <class C>
BasicNovikov<C> nov_pow(const BasicNovikov<C>& a, unsigned long n) {
    BasicNovikov<C> r = BasicNovikov<C>::one();
    BasicNovikov<C> b = a;
    while (n > 0) {
        if (n & 1) r = r * b;
        b = (n >>= 1) ? b * b : b;
    }
    return r;
}

// 1/a via the geometric series around the leading term.  `cap` supplies the
// absolute precision target when `a` is exact but not a monomial.
template <class C>
BasicNovikov<C> nov_invert(const BasicNovikov<C>& a, const Rational& cap = kWorkPrec) {
    if (a.terms.empty()) throw NotInvertible("cannot invert " + a.str());
    Rational v = a.val();
    C c = a.leading_coeff();
    C cinv = coeff_inv(c);
    BasicNovikov<C> lead_inv = BasicNovikov<C>::term(cinv, -v);
    // u = a / (c T^v) - 1, val(u) > 0
    BasicNovikov<C> u = a.scaled(cinv).shifted(-v) - BasicNovikov<C>::one();
    // relative precision of the expansion
    std::optional<Rational> rel = a.prec ? std::optional<Rational>(*a.prec - v) : std::nullopt;
    if (u.is_exact_zero()) {
        auto r = lead_inv;
        if (rel) r = r.truncated(-v + *rel);
        return r;
    }
    Rational rel_target = rel ? *rel : std::max<Rational>(cap + v, 8);
    Rational uval = u.terms.empty() ? *u.prec : u.val();
    if (uval <= 0) throw NotInvertible("non-positive tail valuation in invert");
    BasicNovikov<C> sum = BasicNovikov<C>::one().truncated(rel_target);
    BasicNovikov<C> upow = BasicNovikov<C>::one().truncated(rel_target);
    for (Rational kv = uval; kv < rel_target; kv += uval) {
        upow = (upow * (-u)).truncated(rel_target);
        sum = sum + upow;
        if (upow.terms.empty()) break;
    }
    return (lead_inv * sum).truncated(-v + rel_target);
}

// sqrt(1+u) with val(u) > 0, by the binomial series.
template <class C>
BasicNovikov<C> nov_sqrt1p(const BasicNovikov<C>& u, const Rational& cap = kWorkPrec) {
    if (u.is_exact_zero()) return BasicNovikov<C>::one();
    if (u.terms.empty()) {
        if (*u.prec <= 0) throw PositiveValuationRequired("sqrt1p needs val > 0");
        return BasicNovikov<C>::one().truncated(*u.prec);
    }
    Rational uval = u.val();
    if (uval <= 0) throw PositiveValuationRequired("sqrt1p needs val > 0, got T^" +
                                                   rational_str(uval));
    Rational target = u.prec ? *u.prec : cap;
    BasicNovikov<C> sum = BasicNovikov<C>::one().truncated(target);
    BasicNovikov<C> upow = BasicNovikov<C>::one().truncated(target);
    Rational coef = 1;  // binom(1/2, k)
    long k = 0;
    for (Rational kv = uval; kv < target; kv += uval) {
        upow = (upow * u).truncated(target);
        coef *= (Rational(1, 2) - k) / (k + 1);
        ++k;
        sum = sum + upow.scaled(C(coef));
        if (upow.terms.empty()) break;
    }
    return sum.truncated(target);
}

// exp(u) with val(u) > 0.
template <class C>
BasicNovikov<C> nov_exp_pos(const BasicNovikov<C>& u, const Rational& cap = kWorkPrec) {
    if (u.is_exact_zero()) return BasicNovikov<C>::one();
    if (u.terms.empty()) {
        if (*u.prec <= 0) throw PositiveValuationRequired("exp_pos needs val > 0");
        return BasicNovikov<C>::one().truncated(*u.prec);
    }
    Rational uval = u.val();
    if (uval <= 0)
        throw PositiveValuationRequired("exp_pos needs val > 0, got T^" + rational_str(uval));
    Rational target = u.prec ? *u.prec : cap;
    BasicNovikov<C> sum = BasicNovikov<C>::one().truncated(target);
    BasicNovikov<C> upow = BasicNovikov<C>::one().truncated(target);
    Rational fact = 1;
    long k = 0;
    for (Rational kv = uval; kv < target; kv += uval) {
        upow = (upow * u).truncated(target);
        ++k;
        fact *= k;
        sum = sum + upow.scaled(C(Rational(1) / fact));
        if (upow.terms.empty()) break;
    }
    return sum.truncated(target);
}

using Novikov = BasicNovikov<Rational>;

}  // namespace orb
