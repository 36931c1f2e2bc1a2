#pragma once

// Critical-point analysis over the Novikov field: certified gradient
// residuals, Hensel/Newton refinement with an adjugate-inverse Hessian, and
// the two-branch solver for the P^1(2,2,r) potentials.  The diagonal branch
// works over a number field Q[w]/(w^{r+1} - 1/r) so that one refined point
// represents the full conjugacy class of roots exactly.

#include "orb/numberfield.hpp"
#include "orb/potential.hpp"

#include <array>

namespace orb {

enum class CriticalBranch { HyperplaneZ, Diagonal, Generic };

inline std::string branch_str(CriticalBranch b) {
    switch (b) {
        case CriticalBranch::HyperplaneZ: return "hyperplane_z";
        case CriticalBranch::Diagonal: return "diagonal";
        default: return "generic";
    }
}

template <class C>
struct BasicCriticalPoint {
    std::array<BasicNovikov<C>, 3> coords;
    // Certified lower bound for the valuation of grad W at the point;
    // nullopt means the gradient vanishes identically (+infinity).
    std::optional<Rational> residual_valuation;
    std::array<std::optional<Rational>, 3> coordinate_valuations;
    CriticalBranch branch = CriticalBranch::Generic;
    long multiplicity = 1;  // conjugate roots represented by this point
};

using CriticalPoint = BasicCriticalPoint<Rational>;
using NFCriticalPoint = BasicCriticalPoint<NFElem>;

// Minimum over the three partials of a certified valuation lower bound of
// grad W evaluated at p.  nullopt = +infinity (exact critical point).
template <class C>
std::optional<Rational> gradient_residual(const PotentialSpec& W,
                                          const std::array<BasicNovikov<C>, 3>& p) {
    for (auto& a : p) {
        auto lv = a.val_lower();
        if (lv && *lv < 0)
            throw DivergentSubstitution("critical point coordinate has valuation T^" +
                                        rational_str(*lv) + " < 0");
    }
    TateSeries Ws = W.series_xyz();
    std::optional<Rational> res;
    for (int v = 0; v < 3; ++v) {
        auto e = tate_eval(partial(Ws, v), p[0], p[1], p[2]);
        res = opt_min(res, e.val_lower());
    }
    return res;
}

template <class C>
BasicCriticalPoint<C> make_critical_point(const PotentialSpec& W,
                                          std::array<BasicNovikov<C>, 3> coords,
                                          CriticalBranch branch, long multiplicity = 1) {
    BasicCriticalPoint<C> P;
    P.coords = std::move(coords);
    P.branch = branch;
    P.multiplicity = multiplicity;
    P.residual_valuation = gradient_residual(W, P.coords);
    for (int v = 0; v < 3; ++v) P.coordinate_valuations[v] = P.coords[v].val_opt();
    return P;
}

// Newton iteration p <- p - H^{-1} grad W(p) with the inverse taken as
// adjugate over determinant.  The residual valuation must strictly increase
// every step; the initial residual must exceed twice the valuation loss of
// H^{-1} (Hensel gap), otherwise HenselConditionFailed.
template <class C>
BasicCriticalPoint<C> newton_refine(const PotentialSpec& W, std::array<BasicNovikov<C>, 3> p,
                                    const Rational& target, const Rational& cap = kWorkPrec) {
    using NC = BasicNovikov<C>;
    TateSeries Ws = W.series_xyz();
    TateSeries grad[3], hess[3][3];
    for (int v = 0; v < 3; ++v) grad[v] = partial(Ws, v);
    for (int v = 0; v < 3; ++v)
        for (int u = 0; u < 3; ++u) hess[v][u] = partial(grad[v], u);

    auto eval_grad = [&](const std::array<NC, 3>& q) {
        std::array<NC, 3> g;
        for (int v = 0; v < 3; ++v) g[v] = tate_eval(grad[v], q[0], q[1], q[2]);
        return g;
    };
    auto res_bound = [](const std::array<NC, 3>& g) {
        std::optional<Rational> r;
        for (auto& e : g) r = opt_min(r, e.val_lower());
        return r;
    };

    auto g = eval_grad(p);
    auto res = res_bound(g);
    long iter = 0;
    while (res && *res < target) {
        // A component that is pure big-O below target cannot be improved by
        // further iteration: its bound is a precision artifact.
        bool improvable = false;
        for (auto& e : g)
            if (!e.terms.empty() && e.val() < target) improvable = true;
        if (!improvable)
            throw PrecisionExhausted("gradient residual is O(T^" + rational_str(*res) +
                                     ") but the target is T^" + rational_str(target));

        NC h[3][3];
        for (int v = 0; v < 3; ++v)
            for (int u = 0; u < 3; ++u) h[v][u] = tate_eval(hess[v][u], p[0], p[1], p[2]);
        NC det = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) -
                 h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0]) +
                 h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
        if (det.terms.empty())
            throw HenselConditionFailed("Hessian determinant is not invertible at the seed");
        NC adj[3][3];
        for (int v = 0; v < 3; ++v)
            for (int u = 0; u < 3; ++u) {
                int v1 = (v + 1) % 3, v2 = (v + 2) % 3;
                int u1 = (u + 1) % 3, u2 = (u + 2) % 3;
                // adj[u][v] is the cofactor of h[v][u]
                adj[u][v] = h[v1][u1] * h[v2][u2] - h[v1][u2] * h[v2][u1];
            }
        if (iter == 0) {
            Rational vdet = det.val();
            std::optional<Rational> vadj;
            for (int v = 0; v < 3; ++v)
                for (int u = 0; u < 3; ++u) vadj = opt_min(vadj, adj[v][u].val_lower());
            Rational loss = vdet - *vadj;
            if (loss < 0) loss = 0;
            if (!(*res > 2 * loss))
                throw HenselConditionFailed("residual T^" + rational_str(*res) +
                                            " does not clear the Hensel gap 2*" +
                                            rational_str(loss));
        }
        NC detinv = nov_invert(det, cap);
        for (int v = 0; v < 3; ++v) {
            NC delta = (adj[v][0] * g[0] + adj[v][1] * g[1] + adj[v][2] * g[2]) * detinv;
            p[v] = (p[v] - delta).truncated(cap);
        }
        g = eval_grad(p);
        auto res2 = res_bound(g);
        if (res2 && !(*res2 > *res))
            throw HenselConditionFailed("residual valuation stalled at T^" +
                                        rational_str(*res2));
        res = res2;
        if (++iter > 200) throw PrecisionExhausted("newton iteration budget exceeded");
    }
    auto P = make_critical_point(W, std::move(p), CriticalBranch::Generic);
    return P;
}

namespace detail {

// Coefficient list of the z-only part of dW/dz, indexed by the z-degree.
inline std::vector<Novikov> univariate_dz(const PotentialSpec& W, long r) {
    std::vector<Novikov> g(r, Novikov::zero());
    TateSeries dz = partial(W.series_xyz(), 2);
    for (auto& [m, a] : dz.c) {
        if (m.i != 0 || m.j != 0) continue;
        if (m.k >= (int)g.size()) g.resize(m.k + 1, Novikov::zero());
        g[m.k] = a;
    }
    return g;
}

}  // namespace detail

// Branch z = -2T^8.  The first two critical equations collapse to
// x + y = -T^lambda/2 and the third to xy = T^8 g(-2T^8), a quadratic solved
// by completing the square.  Note val(xy) = 8r: every term of g(-2T^8)
// carries T-exponent exactly 8(r-1).
inline std::vector<CriticalPoint> solve_22r_hyperplane(long r, const Rational& lambda,
                                                       std::vector<Rational> ck,
                                                       const Rational& precision) {
    PotentialSpec W = w_22r(r, lambda, std::move(ck), precision);
    std::vector<Novikov> g = detail::univariate_dz(W, r);
    Novikov z0 = Novikov::term(Rational(-2), 8);
    Novikov gval;
    for (long k = (long)g.size() - 1; k >= 0; --k) gval = gval * z0 + g[k];
    Novikov prod = gval.shifted(8);                     // xy
    Novikov s = Novikov::term(Rational(-1, 2), lambda);  // x + y
    // roots (s +- s*sqrt(1 - 4 xy / s^2)) / 2
    Novikov disc = -(prod.scaled(16).shifted(-2 * lambda));
    Novikov d = s * nov_sqrt1p(disc, precision);
    Novikov x1 = (s + d).scaled(Rational(1, 2));
    Novikov x2 = (s - d).scaled(Rational(1, 2));
    if (std::min(x1.val(), x2.val()) != lambda)
        throw HypothesisViolated("hyperplane branch: expected a root of valuation T^" +
                                 rational_str(lambda));
    if (x1.val() > x2.val()) std::swap(x1, x2);
    return {make_critical_point(W, std::array<Novikov, 3>{x1, x2, z0},
                                CriticalBranch::HyperplaneZ),
            make_critical_point(W, std::array<Novikov, 3>{x2, x1, z0},
                                CriticalBranch::HyperplaneZ)};
}

// Branch x = y.  Eliminating x = -T^lambda/(2 - T^{-8}z) and clearing the
// denominator leaves E(z) = g(z)(2 - T^{-8}z)^2 - T^{2*lambda-8} of degree
// r+1.  The Newton polygon of E must be a single segment from (0, 2l-8) to
// (r+1, -16); its residue equation r Z^{r+1} = 1 is a binomial, so the roots
// form one conjugacy class over Q[w]/(w^{r+1} - 1/r).
inline std::vector<NFCriticalPoint> solve_22r_diagonal(long r, const Rational& lambda,
                                                       std::vector<Rational> ck,
                                                       const Rational& precision) {
    PotentialSpec W = w_22r(r, lambda, std::move(ck), precision);
    std::vector<Novikov> g = detail::univariate_dz(W, r);
    std::vector<Novikov> E(r + 2, Novikov::zero());
    for (long k = 0; k < (long)g.size(); ++k) {
        if (g[k].is_exact_zero()) continue;
        E[k] = E[k] + g[k].scaled(4);
        E[k + 1] = E[k + 1] + g[k].scaled(-4).shifted(-8);
        E[k + 2] = E[k + 2] + g[k].shifted(-16);
    }
    E[0] = E[0] - Novikov::t_power(2 * lambda - 8);

    Rational v0 = E[0].val();
    Rational vtop = E[r + 1].val();
    if (v0 != 2 * lambda - 8 || vtop != -16)
        throw PolygonDegenerate("eliminant endpoints off the expected segment: (" +
                                rational_str(v0) + ", " + rational_str(vtop) + ")");
    for (long d = 1; d <= r; ++d) {
        if (E[d].terms.empty()) continue;
        Rational line = v0 + d * (vtop - v0) / (r + 1);
        if (E[d].val() <= line)
            throw PolygonDegenerate("eliminant coefficient of z^" + std::to_string(d) +
                                    " touches the segment: T^" + rational_str(E[d].val()));
    }
    Rational mu = (2 * lambda + 8) / (r + 1);
    Rational q = -E[0].leading_coeff() / E[r + 1].leading_coeff();
    auto K = make_root_field(r + 1, q, "w^" + std::to_string(r + 1) + " = " + rational_str(q));

    // Refine the root of E univariately: the 3D Newton step pays the full
    // valuation loss of the inverse Hessian, which for larger r eats the
    // entire initial residual, while E'(z) only costs rµ-16.
    using NC = BasicNovikov<NFElem>;
    std::vector<Novikov> dE(r + 1, Novikov::zero());
    for (long d = 1; d <= r + 1; ++d) dE[d - 1] = E[d].scaled(Rational(d));
    auto eval_poly = [&](const std::vector<Novikov>& P, const NC& z) {
        NC acc;
        for (long d = (long)P.size() - 1; d >= 0; --d) {
            NC c;
            c.prec = P[d].prec;
            for (auto& [e, cc] : P[d].terms) c.terms.emplace_back(e, NFElem(cc));
            acc = acc * z + c;
        }
        return acc;
    };
    NC z0 = NC::term(NFElem::gen(K), mu);
    // dz W = E(z) / (2 - T^{-8}z)^2, so aim 2(8-mu) below the final target
    Rational targetE = precision - 24 - 2 * (8 - mu);
    NC ez = eval_poly(E, z0);
    auto res = ez.val_lower();
    long iter = 0;
    while (res && *res < targetE) {
        if (ez.terms.empty() || ez.val() >= targetE)
            throw PrecisionExhausted("eliminant residual is O(T^" + rational_str(*res) +
                                     ") against target T^" + rational_str(targetE));
        NC dz = eval_poly(dE, z0);
        if (dz.terms.empty())
            throw HenselConditionFailed("eliminant derivative vanishes at the seed");
        z0 = (z0 - ez * nov_invert(dz, precision)).truncated(precision);
        ez = eval_poly(E, z0);
        auto res2 = ez.val_lower();
        if (res2 && !(*res2 > *res))
            throw HenselConditionFailed("eliminant residual stalled at T^" +
                                        rational_str(*res2));
        res = res2;
        if (++iter > 200) throw PrecisionExhausted("newton iteration budget exceeded");
    }
    NC denom = NC::constant(NFElem(2)) - z0.shifted(-8);
    NC x0 = nov_invert(denom, precision).scaled(NFElem(-1)).shifted(lambda).truncated(precision);
    auto pt = make_critical_point(W, std::array<NC, 3>{x0, x0, z0},
                                  CriticalBranch::Diagonal, r + 1);
    if (pt.coordinate_valuations[2] != std::optional<Rational>(mu) ||
        pt.coordinate_valuations[0] != std::optional<Rational>(lambda + 8 - mu) ||
        pt.coordinate_valuations[0] != pt.coordinate_valuations[1])
        throw HypothesisViolated("diagonal branch valuations do not match the polygon");
    return {pt};
}

struct EscapeReport {
    long r = 0;
    Rational lambda;
    Rational precision;
    std::vector<CriticalPoint> hyperplane;
    std::vector<NFCriticalPoint> diagonal;
    long count = 0;     // points with multiplicity
    long expected = 0;  // a+b+c-1 = r+3
    Rational xy_val_hyperplane;  // val(xy) on the z = -2T^8 branch, = 8r
    bool all_escape = false;     // every point has min coordinate valuation in [0,3)
    bool pass = false;
};

inline EscapeReport escape_check(long r, const Rational& lambda, std::vector<Rational> ck,
                                 const Rational& precision) {
    EscapeReport rep;
    rep.r = r;
    rep.lambda = lambda;
    rep.precision = precision;
    rep.hyperplane = solve_22r_hyperplane(r, lambda, ck, precision);
    rep.diagonal = solve_22r_diagonal(r, lambda, ck, precision);
    rep.expected = r + 3;
    rep.count = 0;
    rep.all_escape = true;
    auto visit = [&](const auto& P) {
        rep.count += P.multiplicity;
        std::optional<Rational> mn;
        for (auto& v : P.coordinate_valuations) rep.all_escape = rep.all_escape && v.has_value();
        for (auto& v : P.coordinate_valuations) mn = opt_min(mn, v);
        rep.all_escape = rep.all_escape && mn && *mn >= 0 && *mn < 3;
    };
    for (auto& P : rep.hyperplane) visit(P);
    for (auto& P : rep.diagonal) visit(P);
    rep.xy_val_hyperplane =
        (rep.hyperplane[0].coords[0] * rep.hyperplane[0].coords[1]).val();
    rep.pass = rep.count == rep.expected && rep.all_escape;
    return rep;
}

}  // namespace orb
