#pragma once

// Index, area and curvature bookkeeping for the orbifold sphere P^1(a,b,c):
// Euler characteristic, Maslov indices, the area formula, Gauss-Bonnet
// residuals with a symbolic angle perturbation, and the slot enumerator that
// certifies potential truncations.

#include "orb/rational.hpp"
#include "orb/tate.hpp"

#include <algorithm>
#include <vector>

namespace orb {

enum class OrbKind { Spherical, Elliptic, Hyperbolic };

struct OrbifoldData {
    long a = 2, b = 2, c = 2;

    OrbifoldData() = default;
    OrbifoldData(long a_, long b_, long c_) : a(a_), b(b_), c(c_) {
        if (a < 2 || b < 2 || c < 2)
            throw std::invalid_argument("orbifold orders must be >= 2");
    }

    long order(int v) const { return v == 0 ? a : v == 1 ? b : c; }
    Rational chi() const {
        return Rational(1, a) + Rational(1, b) + Rational(1, c) - 1;
    }
    OrbKind kind() const {
        Rational x = chi();
        if (x > 0) return OrbKind::Spherical;
        if (x == 0) return OrbKind::Elliptic;
        return OrbKind::Hyperbolic;
    }
    // triangle area A = 1, total area 8A
    static constexpr long triangle_area = 1;
    static constexpr long total_area = 8;
};

struct CornerData {
    long n1 = 0, n2 = 0, n3 = 0;
    std::vector<Rational> ages;
    long m = 0;

    long nsum() const { return n1 + n2 + n3; }
};

inline Rational maslov_cw(const CornerData& d, const OrbifoldData& o) {
    Rational s = Rational(d.n1, o.a) + Rational(d.n2, o.b) + Rational(d.n3, o.c);
    return 2 * (s + Rational(d.m - 3 * d.nsum()) * o.chi() / 8);
}

inline Rational maslov_de(const Rational& mu_cw, const std::vector<Rational>& ages) {
    Rational s = 0;
    for (auto& i : ages) s += i;
    return mu_cw - 2 * s;
}

inline Rational virtual_dim(const Rational& mu_de, long l, long /*k*/ = 0) {
    return mu_de + 2 * l - 2;
}

struct AreaResult {
    enum Status { Value, NoSuchDisc, Unconstrained } status = Value;
    Rational m;               // raw formula value (may be non-integer/negative)
    bool elliptic_ok = false; // for chi = 0: whether the constraint holds
};

// Index sum S = n1/a + n2/b + n3/c + sum(1 - iota).
inline Rational index_sum(const OrbifoldData& o, long n1, long n2, long n3,
                          const std::vector<Rational>& ages) {
    Rational s = Rational(n1, o.a) + Rational(n2, o.b) + Rational(n3, o.c);
    for (auto& i : ages) s += 1 - i;
    return s;
}

inline AreaResult area_multiple(const OrbifoldData& o, long n1, long n2, long n3,
                                const std::vector<Rational>& ages) {
    AreaResult r;
    Rational chi = o.chi();
    Rational S = index_sum(o, n1, n2, n3, ages);
    if (chi == 0) {
        r.status = AreaResult::Unconstrained;
        r.elliptic_ok = (S == 1);
        return r;
    }
    Rational m = 3 * (n1 + n2 + n3) + 8 * (S - 1) / (-chi);
    r.m = m;
    r.status = (is_integer(m) && m >= 0) ? AreaResult::Value : AreaResult::NoSuchDisc;
    return r;
}

struct Slot {
    long n1 = 0, n2 = 0, n3 = 0;
    std::vector<Rational> ages;
    bool m_unconstrained = false;  // elliptic case
    Rational e;                    // T-exponent m - 3*sum(n); meaningful when constrained
    long m = 0;

    long nsum() const { return n1 + n2 + n3; }
    auto key() const { return std::tuple(e, n1, n2, n3, ages); }
};

// All corner/age data whose standard-frame T-exponent m - 3*sum(n) lies in
// [-8, cap]; elliptic kinds return the constraint-satisfying data with m
// unconstrained.
inline std::vector<Slot> slot_enumerate(const OrbifoldData& o,
                                        const std::vector<Rational>& available_ages,
                                        const Rational& cap) {
    Rational chi = o.chi();
    Rational smin, smax;
    if (chi == 0) {
        smin = smax = 1;
    } else {
        Rational s1 = 1 + chi;            // at e = -8
        Rational s2 = 1 - cap * chi / 8;  // at e = cap
        smin = std::min(s1, s2);
        smax = std::max(s1, s2);
    }
    for (auto& i : available_ages)
        if (i <= 0 || i >= 1)
            throw std::invalid_argument("ages must lie in (0,1)");

    std::vector<Slot> out;
    auto consider = [&](long n1, long n2, long n3, const std::vector<Rational>& ages) {
        Rational S = index_sum(o, n1, n2, n3, ages);
        if (S < smin || S > smax) return;
        Slot s;
        s.n1 = n1;
        s.n2 = n2;
        s.n3 = n3;
        s.ages = ages;
        if (chi == 0) {
            if (S != 1) return;
            s.m_unconstrained = true;
            out.push_back(std::move(s));
            return;
        }
        Rational e = 8 * (1 - S) / chi;
        if (e < -8 || e > cap) return;
        Rational m = e + 3 * (n1 + n2 + n3);
        if (!is_integer(m) || m < 0) return;  // no such disc
        s.e = e;
        s.m = to_long(m);
        out.push_back(std::move(s));
    };

    // Bounds: each contribution to S is non-negative, so every component is
    // capped by smax.
    Rational abound = Rational(o.a) * smax;
    long n1max = static_cast<long>(numerator(abound) / denominator(abound));
    std::vector<Rational> ages;
    std::function<void(size_t, long, long, long)> rec_age =
        [&](size_t idx, long n1, long n2, long n3) {
            consider(n1, n2, n3, ages);
            for (size_t t = idx; t < available_ages.size(); ++t) {
                Rational add = 1 - available_ages[t];
                if (index_sum(o, n1, n2, n3, ages) + add > smax) continue;
                ages.push_back(available_ages[t]);
                rec_age(t, n1, n2, n3);
                ages.pop_back();
            }
        };
    for (long n1 = 0; n1 <= n1max; ++n1) {
        if (Rational(n1, o.a) > smax) break;
        for (long n2 = 0;; ++n2) {
            Rational s12 = Rational(n1, o.a) + Rational(n2, o.b);
            if (s12 > smax) break;
            for (long n3 = 0;; ++n3) {
                if (s12 + Rational(n3, o.c) > smax) break;
                rec_age(0, n1, n2, n3);
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Slot& p, const Slot& q) { return p.key() < q.key(); });
    return out;
}

// Rational multiple of pi with a formal perturbation parameter:
// value = (q + e*eps) * pi.
struct EpsRational {
    Rational q = 0;
    Rational e = 0;

    EpsRational() = default;
    EpsRational(Rational q_, Rational e_ = 0) : q(std::move(q_)), e(std::move(e_)) {}

    EpsRational operator+(const EpsRational& o) const { return {q + o.q, e + o.e}; }
    EpsRational operator-(const EpsRational& o) const { return {q - o.q, e - o.e}; }
    EpsRational scaled(const Rational& s) const { return {q * s, e * s}; }
    bool is_zero() const { return q == 0 && e == 0; }
    bool operator==(const EpsRational&) const = default;

    std::string str() const {
        return "(" + rational_str(q) + " + " + rational_str(e) + "*eps)*pi";
    }
};

// Integral of K over m triangle areas, in pi units: m * (A K / pi) = m*chi/4,
// from chi = 8AK/2pi with A = 1.
inline EpsRational curvature_area_term(const OrbifoldData& o, long m) {
    return EpsRational(Rational(m) * o.chi() / 4);
}

// The geodesic-curvature density of each triangle side, in pi units per side
// total length 1: k_12 = k_23 = k_31 = -3chi/8 + eps.
inline EpsRational side_curvature(const OrbifoldData& o) {
    return EpsRational(-3 * o.chi() / 8, 1);
}

// Gauss-Bonnet residual for an orbi-polygon:
//   integral K dA + sum(angle terms) + sum(integral k ds) + 2 sum(1-iota) - 2,
// everything a rational multiple of pi with eps carried symbolically.
inline EpsRational gauss_bonnet_residual(const EpsRational& area_K,
                                         const std::vector<EpsRational>& angles,
                                         const std::vector<EpsRational>& geodesic_totals,
                                         const std::vector<Rational>& ages) {
    EpsRational r = area_K;
    for (auto& a : angles) r = r + a;
    for (auto& g : geodesic_totals) r = r + g;
    Rational twisted = 0;
    for (auto& i : ages) twisted += 1 - i;
    r.q += 2 * twisted - 2;
    return r;
}

struct AreaCheckEntry {
    Monomial mono;
    long m = 0;
    std::vector<Rational> ages;
};

struct AreaCheckResult {
    Monomial mono;
    long m = 0;
    Rational lhs, rhs;
    bool pass = false;
};

// Per-term check of (m - 3 sum n)(-chi/8) = sum n_v/a_v + sum(1-iota) - 1; for
// chi = 0 the elliptic constraint sum n_v/a_v + sum(1-iota) = 1 instead.
inline AreaCheckResult check_area_relation(const OrbifoldData& o, const AreaCheckEntry& t) {
    AreaCheckResult r;
    r.mono = t.mono;
    r.m = t.m;
    Rational S = index_sum(o, t.mono.i, t.mono.j, t.mono.k, t.ages);
    Rational chi = o.chi();
    if (chi == 0) {
        r.lhs = S;
        r.rhs = 1;
    } else {
        r.lhs = Rational(t.m - 3 * t.mono.deg()) * (-chi / 8);
        r.rhs = S - 1;
    }
    r.pass = (r.lhs == r.rhs);
    return r;
}

inline std::vector<AreaCheckResult> validate_area_relations(
    const OrbifoldData& o, const std::vector<AreaCheckEntry>& entries) {
    std::vector<AreaCheckResult> out;
    out.reserve(entries.size());
    for (auto& t : entries) out.push_back(check_area_relation(o, t));
    return out;
}

}  // namespace orb
