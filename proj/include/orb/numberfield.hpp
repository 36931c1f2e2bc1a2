#pragma once

// Arithmetic in a simple extension Q[w]/(m(w)) with m monic, for exact
// critical-point coordinates whose residues are algebraic.  An element with
// no attached field behaves as a rational constant and is promoted on first
// contact, which lets BasicNovikov<NFElem> reuse the generic series code.

#include "orb/errors.hpp"
#include "orb/rational.hpp"

#include <memory>
#include <vector>

namespace orb {

struct NumberField {
    // monic modulus w^n + m[n-1] w^{n-1} + ... + m[0]
    std::vector<Rational> m;
    std::string label;

    long deg() const { return (long)m.size(); }
};

// w^n - q, irreducibility checked: q must not be a p-th power for any prime
// p | n, and for 4 | n additionally q != -4 b^4.
inline std::shared_ptr<const NumberField> make_root_field(long n, const Rational& q,
                                                          const std::string& label) {
    auto is_pth_power = [](const Rational& a, long p) {
        if (a < 0 && p % 2 == 0) return false;
        auto root_of = [&](Integer v) -> std::optional<Integer> {
            bool neg = v < 0;
            if (neg) v = -v;
            if (neg && p % 2 == 0) return std::nullopt;
            Integer lo = 0, hi = v + 1;
            while (lo + 1 < hi) {
                Integer mid = (lo + hi) / 2;
                Integer pw = 1;
                for (long i = 0; i < p && pw <= v; ++i) pw *= mid;
                if (pw <= v)
                    lo = mid;
                else
                    hi = mid;
            }
            Integer pw = 1;
            for (long i = 0; i < p; ++i) pw *= lo;
            if (pw == v) return neg ? Integer(-lo) : lo;
            return std::nullopt;
        };
        return root_of(numerator(a)).has_value() && root_of(denominator(a)).has_value();
    };
    for (long p = 2; p <= n; ++p) {
        if (n % p != 0) continue;
        bool prime = true;
        for (long d = 2; d * d <= p; ++d)
            if (p % d == 0) prime = false;
        if (!prime) continue;
        if (is_pth_power(q, p))
            throw HypothesisViolated("modulus w^" + std::to_string(n) + " - " +
                                     rational_str(q) + " is reducible (p-th power, p=" +
                                     std::to_string(p) + ")");
    }
    if (n % 4 == 0 && is_pth_power(-q / 4, 4))
        throw HypothesisViolated("modulus reducible (-4 b^4 case)");
    auto F = std::make_shared<NumberField>();
    F->m.assign(n, Rational(0));
    F->m[0] = -q;
    F->label = label;
    return F;
}

struct NFElem {
    std::shared_ptr<const NumberField> F;  // null: plain rational constant
    std::vector<Rational> c;               // coefficients in w; size F->deg() or 1

    NFElem() : c{Rational(0)} {}
    NFElem(long v) : c{Rational(v)} {}
    NFElem(const Rational& v) : c{v} {}
    NFElem(std::shared_ptr<const NumberField> f, std::vector<Rational> cc)
        : F(std::move(f)), c(std::move(cc)) {
        c.resize(F->deg(), Rational(0));
    }

    static NFElem gen(const std::shared_ptr<const NumberField>& f) {
        std::vector<Rational> cc(f->deg(), Rational(0));
        if (f->deg() == 1)
            cc[0] = -f->m[0];
        else
            cc[1] = 1;
        return NFElem(f, std::move(cc));
    }

    bool is_zero() const {
        for (auto& v : c)
            if (v != 0) return false;
        return true;
    }

    bool is_rational() const {
        for (size_t i = 1; i < c.size(); ++i)
            if (c[i] != 0) return false;
        return true;
    }
    const Rational& rat() const { return c[0]; }
};

namespace nfdetail {

inline void promote(NFElem& a, const NFElem& b) {
    if (a.F || !b.F) return;
    Rational v = a.c[0];
    a.F = b.F;
    a.c.assign(b.F->deg(), Rational(0));
    a.c[0] = v;
}

// reduce a coefficient vector of any length modulo the monic modulus
inline std::vector<Rational> reduce_mod(std::vector<Rational> p, const NumberField& F) {
    long n = F.deg();
    for (long d = (long)p.size() - 1; d >= n; --d) {
        Rational lead = p[d];
        if (lead == 0) continue;
        p[d] = 0;
        for (long i = 0; i < n; ++i) p[d - n + i] -= lead * F.m[i];
    }
    p.resize(n, Rational(0));
    return p;
}

}  // namespace nfdetail

inline NFElem operator+(NFElem a, NFElem b) {
    nfdetail::promote(a, b);
    nfdetail::promote(b, a);
    for (size_t i = 0; i < a.c.size(); ++i) a.c[i] += b.c[i];
    return a;
}

inline NFElem operator-(NFElem a) {
    for (auto& v : a.c) v = -v;
    return a;
}

inline NFElem operator-(const NFElem& a, const NFElem& b) { return a + (-b); }

inline NFElem operator*(NFElem a, NFElem b) {
    nfdetail::promote(a, b);
    nfdetail::promote(b, a);
    if (!a.F) {
        a.c[0] *= b.c[0];
        return a;
    }
    std::vector<Rational> p(a.c.size() + b.c.size() - 1, Rational(0));
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        for (size_t j = 0; j < b.c.size(); ++j) p[i + j] += a.c[i] * b.c[j];
    }
    return NFElem(a.F, nfdetail::reduce_mod(std::move(p), *a.F));
}

inline bool operator==(const NFElem& a, const NFElem& b) { return (a - b).is_zero(); }

inline bool coeff_is_zero(const NFElem& a) { return a.is_zero(); }

// inverse by the extended Euclidean algorithm in Q[w] against the modulus
inline NFElem coeff_inv(const NFElem& a) {
    if (a.is_zero()) throw NotInvertible("division by zero in the number field");
    if (!a.F || a.is_rational()) {
        NFElem r = a;
        r.c.assign(r.c.size(), Rational(0));
        r.c[0] = Rational(1) / a.rat();
        return r;
    }
    using Poly = std::vector<Rational>;
    auto degp = [](const Poly& p) {
        for (long d = (long)p.size() - 1; d >= 0; --d)
            if (p[d] != 0) return d;
        return (long)-1;
    };
    Poly r0 = a.F->m;  // modulus, monic
    r0.push_back(1);
    Poly r1 = a.c;
    Poly s0(1, Rational(0)), s1(1, Rational(1));  // Bezout coeffs for a
    while (degp(r1) > 0) {
        long d0 = degp(r0), d1 = degp(r1);
        Poly q(std::max<long>(d0 - d1 + 1, 1), Rational(0));
        Poly rem = r0;
        for (long d = d0; d >= d1; --d) {
            Rational f = rem[d] / r1[d1];
            if (f == 0) continue;
            q[d - d1] = f;
            for (long i = 0; i <= d1; ++i) rem[d - d1 + i] -= f * r1[i];
        }
        // (r0, r1) <- (r1, rem); (s0, s1) <- (s1, s0 - q*s1)
        Poly qs(q.size() + s1.size() - 1, Rational(0));
        for (size_t i = 0; i < q.size(); ++i)
            for (size_t j = 0; j < s1.size(); ++j) qs[i + j] += q[i] * s1[j];
        Poly s2 = s0;
        s2.resize(std::max(s2.size(), qs.size()), Rational(0));
        for (size_t i = 0; i < qs.size(); ++i) s2[i] -= qs[i];
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    long d1 = degp(r1);
    if (d1 != 0)
        throw NotInvertible("element shares a factor with the modulus");
    Rational unit = r1[0];
    for (auto& v : s1) v /= unit;
    return NFElem(a.F, nfdetail::reduce_mod(std::move(s1), *a.F));
}

inline std::string coeff_str(const NFElem& a) {
    if (!a.F || a.is_rational()) return rational_str(a.c[0]);
    std::string s;
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        if (!s.empty()) s += " + ";
        s += rational_str(a.c[i]);
        if (i >= 1) s += "*w";
        if (i >= 2) s += "^" + std::to_string(i);
    }
    return s.empty() ? "0" : s;
}

}  // namespace orb
