#pragma once

// Jacobian ring of a potential over the three-variable Tate algebra.
//
// Conventions used throughout this header.  A potential W with the standard
// leading form satisfies T^8 W = -xi*xyz + T^8(x^a+y^b+z^c) + higher, xi a
// unit of valuation 0.  The normalized generators are
//   g1 = -xi*yz + a T^8 x^{a-1}   (and cyclic analogues),
// the partials of the T^8-scaled leading potential.  Every ReductionResult
// decomposes its input against the T^8-scaled partials of its target
// potential: for reduce_lead these are the g_j themselves, for reduce_full
// they are T^8 * dW/dv.  The reconstruction identity
//   input = sum c_i gamma_i + sum t_j * (T^8-scaled partial_j)
// holds modulo T^{certified_precision} and is checked by verify_reduction.

#include "orb/potential.hpp"
#include "orb/tate.hpp"

#include <array>
#include <map>
#include <set>

namespace orb {

// Canonical basis 1, x..x^{a-1}, y..y^{b-1}, z..z^{c-1}, xyz of size a+b+c-1.
inline std::vector<Monomial> jac_basis(const OrbifoldData& o) {
    std::vector<Monomial> b;
    b.push_back({0, 0, 0});
    for (int i = 1; i < o.a; ++i) b.push_back({i, 0, 0});
    for (int j = 1; j < o.b; ++j) b.push_back({0, j, 0});
    for (int k = 1; k < o.c; ++k) b.push_back({0, 0, k});
    b.push_back({1, 1, 1});
    return b;
}

inline bool is_basis_monomial(const Monomial& m, const OrbifoldData& o) {
    if (m == Monomial{1, 1, 1}) return true;
    int pos = (m.i > 0) + (m.j > 0) + (m.k > 0);
    if (pos == 0) return true;
    if (pos >= 2) return false;
    if (m.i > 0) return m.i < o.a;
    if (m.j > 0) return m.j < o.b;
    return m.k < o.c;
}

inline std::array<TateSeries, 3> lead_generators(const OrbifoldData& o,
                                                 const Novikov& xi) {
    std::array<TateSeries, 3> g;
    for (int v = 0; v < 3; ++v) {
        long av = o.order(v);
        Monomial pair = Monomial{1, 1, 1}.plus(v, -1);
        Monomial pw = Monomial{}.plus(v, (int)av - 1);
        g[v] = TateSeries::mono(pair, -xi) +
               TateSeries::mono(pw, Novikov::term(av, 8));
    }
    return g;
}

struct ReductionResult {
    std::map<Monomial, Novikov> coeffs;      // basis monomial -> coefficient
    std::array<TateSeries, 3> multipliers;   // against T^8-scaled partials
    Rational certified_precision = 0;

    Novikov coeff(const Monomial& m) const {
        auto it = coeffs.find(m);
        return it == coeffs.end() ? Novikov::zero() : it->second;
    }
    bool coeffs_vanish() const {
        for (auto& [m, a] : coeffs)
            if (!a.truncated(certified_precision).terms.empty()) return false;
        return true;
    }
};

// Rewrite P into the canonical basis modulo the leading generators.
//
// Strategy, applied to one term u * x^i y^j z^k at a time:
//   - basis monomials settle into the output;
//   - with at least two positive exponents (and not xyz itself) a type I
//     replacement consumes the pair of variables containing the maximum
//     exponent (ties x > y > z), gaining T^8;
//   - a single positive exponent at or above its order takes a type II
//     replacement back toward xyz, paying T^{-8}.
// Always consuming the pair that contains the maximal exponent prevents the
// type II / type I round trip on the same variable, so every chain gains
// valuation and terminates at the certified precision; loops through several
// monomials (such as x^2yz on (3,3,3)) re-enter the agenda with an extra
// T^{24} factor and sum to the geometric series (1 - 27T^{24})^{-1}.
inline ReductionResult reduce_lead(const TateSeries& P, const OrbifoldData& o,
                                   const Novikov& xi = Novikov::one(),
                                   const Rational& cap = kAssertPrec) {
    ReductionResult R;
    R.certified_precision = cap;
    for (auto& [m, a] : P.c)
        if (a.prec && *a.prec < R.certified_precision) R.certified_precision = *a.prec;
    const Rational cert = R.certified_precision;
    // internal margin: a type II step pays T^{-8}, so work 8 above the
    // certified precision to deliver full precision at the output
    const Rational work = cert + 8;

    if (xi.terms.empty() || xi.val() != 0)
        throw LeadingTermMismatch("normalization unit must have valuation 0");
    Novikov xi_inv = nov_invert(xi, work + 16);

    std::map<Monomial, Novikov> agenda;
    for (auto& [m, a] : P.c)
        if (!a.is_exact_zero()) agenda[m] = a;

    // Truncation is only applied when a coefficient actually reaches the
    // certified precision; finite exact chains stay exact.
    bool dropped = false;
    auto tidy = [&](const Novikov& a) {
        if (!a.prec && (a.terms.empty() || a.terms.back().first < work)) return a;
        return a.truncated(work);
    };
    auto push = [&](const Monomial& m, const Novikov& a) {
        Novikov t = tidy(a);
        if (t.is_exact_zero()) return;
        auto it = agenda.find(m);
        if (it == agenda.end())
            agenda[m] = t;
        else
            it->second = it->second + t;
    };
    auto add_mult = [&](int v, const Monomial& m, const Novikov& a) {
        Novikov t = tidy(a);
        if (t.is_exact_zero()) return;
        R.multipliers[v].c[m] = R.multipliers[v].coeff(m) + t;
    };

    long guard = 0;
    while (!agenda.empty()) {
        if (++guard > 4000000) throw ReductionStalled("rewriting exceeded step budget");
        auto it = agenda.begin();
        Monomial m = it->first;
        Novikov u = it->second;
        agenda.erase(it);
        if (u.is_exact_zero()) continue;
        auto lv = u.val_lower();
        if (lv && *lv >= work) {
            dropped = true;
            continue;
        }

        if (is_basis_monomial(m, o)) {
            auto ct = R.coeffs.find(m);
            if (ct == R.coeffs.end())
                R.coeffs[m] = tidy(u);
            else
                ct->second = ct->second + tidy(u);
            continue;
        }

        int pos = (m.i > 0) + (m.j > 0) + (m.k > 0);
        if (pos >= 2) {
            // type I: raise v by a_v - 1, consume the other two variables
            int vmax = 0;
            for (int v = 1; v < 3; ++v)
                if (m.exp(v) > m.exp(vmax)) vmax = v;
            int v = -1;
            for (int w = 0; w < 3; ++w) {
                if (w == vmax) continue;
                int o1 = (w + 1) % 3, o2 = (w + 2) % 3;
                if (m.exp(o1) >= 1 && m.exp(o2) >= 1) {
                    v = w;
                    break;
                }
            }
            if (v < 0) throw ReductionStalled("no applicable replacement at " + m.str());
            long av = o.order(v);
            Monomial dec = m.plus((v + 1) % 3, -1).plus((v + 2) % 3, -1);
            add_mult(v, dec, -(u * xi_inv));
            push(dec.plus(v, (int)av - 1), u * xi_inv * Novikov::term(av, 8));
        } else {
            // type II: single pure power at or above its order
            int v = m.i > 0 ? 0 : m.j > 0 ? 1 : 2;
            long av = o.order(v);
            Monomial tm = m.plus(v, -(int)(av - 1));
            add_mult(v, tm, u.scaled(Rational(1, av)).shifted(-8));
            push(tm.plus((v + 1) % 3, 1).plus((v + 2) % 3, 1),
                 u * xi * Novikov::term(Rational(1, av), -8));
        }
    }
    if (dropped) {
        for (auto& [m, a] : R.coeffs) a = a.truncated(work);
        for (auto& t : R.multipliers) t = t.truncated(work);
    }
    return R;
}

// T^8-scaled partials of the full potential and their split into the leading
// generators g_j and the higher part h_j (val h_j = lambda0 > 8).
struct FullGenerators {
    Novikov xi;
    std::array<TateSeries, 3> g, h, full;  // full = g + h = T^8 * dW
    std::optional<Rational> lambda0;       // nullopt when h = 0
};

inline FullGenerators full_generators(const PotentialSpec& W) {
    FullGenerators F;
    F.xi = leading_unit_xi(W);
    TateSeries Wx = W.series_xyz();
    F.g = lead_generators(W.orb, F.xi);
    for (int v = 0; v < 3; ++v) {
        F.full[v] = partial(Wx, v);
        for (auto& [m, a] : F.full[v].c) a = a.shifted(8);
        F.h[v] = F.full[v] - F.g[v];
        F.lambda0 = opt_min(F.lambda0, F.h[v].min_val_lower());
    }
    if (F.lambda0 && *F.lambda0 <= 8)
        throw LeadingTermMismatch("higher part of the potential has valuation <= 8");
    return F;
}

// Iterative reduction against a full potential: each pass rewrites the
// residual modulo the leading generators and re-expands the multipliers
// against g_j = (T^8 dW_j) - h_j, improving the residual valuation by
// lambda0 - 8 per pass.
inline ReductionResult reduce_full(const TateSeries& P, const PotentialSpec& W,
                                   const Rational& cap = kAssertPrec) {
    FullGenerators F = full_generators(W);
    ReductionResult total;
    total.certified_precision = cap;
    TateSeries R = P;
    std::optional<Rational> prev;
    long guard = 0;
    while (true) {
        auto rv = R.min_val_lower();
        if (!rv || *rv >= total.certified_precision) break;
        if (prev && !(*rv > *prev)) throw ReductionStalled("no valuation progress");
        prev = rv;
        if (++guard > 100000) throw ReductionStalled("pass budget exceeded");
        ReductionResult L = reduce_lead(R, W.orb, F.xi, total.certified_precision);
        if (L.certified_precision < total.certified_precision)
            total.certified_precision = L.certified_precision;
        for (auto& [m, a] : L.coeffs) {
            auto it = total.coeffs.find(m);
            if (it == total.coeffs.end())
                total.coeffs[m] = a;
            else
                it->second = it->second + a;
        }
        R = TateSeries();
        for (int v = 0; v < 3; ++v) {
            total.multipliers[v] = total.multipliers[v] + L.multipliers[v];
            if (!F.h[v].c.empty()) R = R - L.multipliers[v] * F.h[v];
        }
        R = R.truncated(total.certified_precision + 8);
    }
    for (auto& [m, a] : total.coeffs) a = a.truncated(total.certified_precision);
    return total;
}

// Recompute the reconstruction identity for a ReductionResult against the
// given T^8-scaled partials; true when the defect vanishes below the
// certified precision.
inline bool verify_reduction(const TateSeries& P, const ReductionResult& R,
                             const std::array<TateSeries, 3>& gens) {
    TateSeries D = P;
    for (auto& [m, a] : R.coeffs) D = D - TateSeries::mono(m, a);
    for (int v = 0; v < 3; ++v) D = D - R.multipliers[v] * gens[v];
    for (auto& [m, a] : D.c)
        if (!a.truncated(R.certified_precision).terms.empty()) return false;
    return true;
}

// --- independent linear-algebra membership oracle ------------------------

// Row-reduces the span of monomial multiples M * (T^8 dW_j), deg M <= D,
// over the Novikov field with min-valuation pivoting, never pivoting on
// basis monomials.  Provenance multipliers ride along with each row, so a
// reduced target yields both basis coefficients and multipliers.  This is a
// different algorithm from the rewriting reducer and serves as its oracle.
class MembershipOracle {
  public:
    struct Answer {
        bool solvable = false;
        std::map<Monomial, Novikov> coeffs;
        std::array<TateSeries, 3> t;
        Rational certified_precision = 0;
    };

    MembershipOracle(const PotentialSpec& W, int D, const Rational& N)
        : o_(W.orb), N_(N) {
        FullGenerators F = full_generators(W);
        std::vector<Monomial> ms;
        for (int d = 0; d <= D; ++d)
            for (int i = 0; i <= d; ++i)
                for (int j = 0; i + j <= d; ++j)
                    ms.push_back({i, j, d - i - j});
        for (auto& M : ms)
            for (int v = 0; v < 3; ++v) {
                Row r;
                r.body = (TateSeries::mono(M, Novikov::one()) * F.full[v]).truncated(N_);
                r.mult[v] = TateSeries::mono(M, Novikov::one());
                register_relation(std::move(r));
            }
    }

    // Basis-only remainders discovered while building the span; a nonzero
    // entry here below the margin would witness a dependence among the basis
    // classes.
    const std::vector<TateSeries>& defects() const { return defects_; }

    // Certify that no relation row collapsed onto the basis span below
    // T^{N-16}; throws IndependenceUncertified otherwise.
    void certify_independence() const {
        Rational margin = N_ - 16;
        if (junk_ < margin)
            throw IndependenceUncertified(
                "precision exhausted during elimination at T^" + rational_str(junk_));
        for (auto& d : defects_)
            for (auto& [m, a] : d.c)
                if (!a.truncated(margin).terms.empty())
                    throw IndependenceUncertified(
                        "relation reduced onto basis monomial " + m.str() +
                        " with coefficient " + a.str());
    }

    Answer reduce(const TateSeries& P) const {
        Row r;
        r.body = P.truncated(N_);
        reduce_row(r);
        Answer a;
        a.certified_precision = N_;
        a.solvable = true;
        for (auto& [m, c] : r.body.c) {
            if (is_basis_monomial(m, o_)) {
                a.coeffs[m] = c;
                continue;
            }
            auto lv = c.val_lower();
            if (!lv || *lv < N_) a.solvable = false;
        }
        if (a.solvable)
            for (int v = 0; v < 3; ++v) a.t[v] = -r.mult[v];
        return a;
    }

  private:
    struct Row {
        TateSeries body;
        std::array<TateSeries, 3> mult;
    };

    OrbifoldData o_;
    Rational N_;
    std::map<Monomial, Row> pivots_;
    std::vector<TateSeries> defects_;
    // min valuation among big-O residues discarded during elimination
    mutable Rational junk_ = Rational(1000000000);

    static void axpy(Row& r, const Novikov& t, const Row& p) {
        r.body = r.body - p.body.scaled(t);
        for (int v = 0; v < 3; ++v) r.mult[v] = r.mult[v] - p.mult[v].scaled(t);
    }

    void clear_entry(Row& r, const Monomial& m) const {
        // the entry is exactly zero mathematically; discard the numerical
        // big-O residue left by the truncated inverse
        r.body.c.erase(m);
    }

    void eliminate(Row& r, const Monomial& m) const {
        const Row& p = pivots_.at(m);
        Novikov c = r.body.coeff(m);
        if (c.is_exact_zero()) return;
        if (c.terms.empty()) {
            junk_ = std::min(junk_, *c.prec);
            r.body.c.erase(m);
            return;
        }
        Novikov t = c * nov_invert(p.body.coeff(m), N_ + 48);
        axpy(r, t, p);
        clear_entry(r, m);
    }

    void reduce_row(Row& r) const {
        while (true) {
            std::optional<Monomial> best;
            std::optional<Rational> bestv;
            for (auto& [m, c] : r.body.c) {
                if (is_basis_monomial(m, o_) || !pivots_.count(m)) continue;
                if (c.is_exact_zero()) continue;
                auto lv = c.val_lower();
                if (!lv) continue;
                if (!best || *lv < *bestv) {
                    best = m;
                    bestv = lv;
                }
            }
            if (!best) break;
            Monomial m = *best;  // copy: elimination rebuilds the row map
            eliminate(r, m);
        }
        r.body.prune();
    }

    void register_relation(Row r) {
        reduce_row(r);
        const Monomial* pm = nullptr;
        std::optional<Rational> pv;
        for (auto& [m, c] : r.body.c) {
            if (is_basis_monomial(m, o_)) continue;
            if (c.is_exact_zero() || c.terms.empty()) {
                if (c.prec) junk_ = std::min(junk_, *c.prec);
                continue;
            }
            if (c.val() >= N_) continue;
            if (!pm || c.val() < *pv || (c.val() == *pv && m < *pm)) {
                pm = &m;
                pv = c.val();
            }
        }
        if (!pm) {
            TateSeries rem;
            for (auto& [m, c] : r.body.c)
                if (is_basis_monomial(m, o_) && !c.is_exact_zero()) rem.c[m] = c;
            if (!rem.c.empty()) defects_.push_back(std::move(rem));
            return;
        }
        Monomial m = *pm;
        // keep existing pivot rows free of the new pivot monomial
        std::vector<Monomial> touch;
        for (auto& [q, row] : pivots_)
            if (row.body.c.count(m)) touch.push_back(q);
        pivots_.emplace(m, std::move(r));
        for (auto& q : touch) {
            Row& row = pivots_.at(q);
            eliminate(row, m);
            row.body.prune();
        }
    }
};

// Rank of the Jacobian ring: returns a+b+c-1 after (i) checking reduce_full
// is the identity on the canonical basis and (ii) certifying basis
// independence through the linear-algebra oracle at the working window.
inline long rank(const PotentialSpec& W, const Rational& N = kAssertPrec,
                 int D = 6) {
    auto basis = jac_basis(W.orb);
    for (auto& g : basis) {
        auto R = reduce_full(TateSeries::mono(g, Novikov::one()), W, N);
        for (auto& [m, a] : R.coeffs) {
            Novikov want = (m == g) ? Novikov::one() : Novikov::zero();
            if (!a.agrees_with(want, R.certified_precision))
                throw IndependenceUncertified("basis element " + g.str() +
                                              " is not reduction-stable");
        }
        if (R.coeffs.find(g) == R.coeffs.end())
            throw IndependenceUncertified("basis element " + g.str() + " vanished");
    }
    MembershipOracle oracle(W, D, N);
    oracle.certify_independence();
    return (long)basis.size();
}

inline bool jac_class_equal(const TateSeries& P, const TateSeries& Q,
                            const PotentialSpec& W, const Rational& N = kAssertPrec) {
    auto R = reduce_full(P - Q, W, N);
    return R.coeffs_vanish();
}

}  // namespace orb
