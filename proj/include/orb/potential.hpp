#pragma once

// Potential constructors: the leading-order potential W_lead for any (a,b,c),
// the closed form for P^1(3,3,3), the parametric bulk-deformed potential for
// P^1(2,2,r), point-class weighting, and JSON (de)serialization.

#include "orb/geometry.hpp"
#include "orb/novikov.hpp"
#include "orb/tate.hpp"

#include "json.hpp"

#include <fstream>
#include <optional>

namespace orb {

enum class Provenance { Lead, Closed333, Param22r, External };

struct PotentialTerm {
    Monomial mono;
    Rational t_exp;
    Rational coef;
    std::optional<long> area;  // disc area multiple m
};

struct PotentialSpec {
    OrbifoldData orb;
    VariableFrame frame = VariableFrame::xyz;
    std::vector<PotentialTerm> terms;
    std::map<Monomial, std::vector<Rational>> ages;  // interior insertions per monomial
    Provenance prov = Provenance::External;
    std::optional<Rational> t_precision;  // nullopt = exact
    long degree_cap = 0;

    TateSeries series() const {
        TateSeries s;
        for (auto& t : terms) {
            Novikov add = Novikov::term(t.coef, t.t_exp);
            auto it = s.c.find(t.mono);
            if (it == s.c.end())
                s.c[t.mono] = add;
            else
                it->second = it->second + add;
        }
        if (t_precision) s = s.truncated(*t_precision);
        s.prune();
        return s;
    }

    // The series in the standard (x,y,z) frame regardless of stored frame.
    TateSeries series_xyz() const {
        TateSeries s = series();
        return frame == VariableFrame::tilde ? from_tilde(s) : s;
    }
    TateSeries series_tilde() const {
        TateSeries s = series();
        return frame == VariableFrame::xyz ? to_tilde(s) : s;
    }
};

// phi(T) = sum (-1)^k (2k+1) T^{36k^2+36k}, truncated below T^N.
inline Novikov phi_series(const Rational& N) {
    Novikov s;
    s.prec = N;
    for (long k = 0;; ++k) {
        Rational e = 36 * k * k + 36 * k;
        if (e >= N) break;
        s.terms.emplace_back(e, Rational((k % 2 ? -1 : 1) * (2 * k + 1)));
    }
    s.normalize();
    return s;
}

// psi(T) = T^{-8}(1 + sum_{k>=1} (-1)^k((6k+1)T^{36k^2+12k} - (6k-1)T^{36k^2-12k})).
inline Novikov psi_series(const Rational& N) {
    Novikov s;
    s.prec = N;
    s.terms.emplace_back(-8, Rational(1));
    for (long k = 1;; ++k) {
        Rational lo = 36 * k * k - 12 * k - 8;
        Rational hi = 36 * k * k + 12 * k - 8;
        if (lo >= N) break;
        long sg = (k % 2 ? -1 : 1);
        if (hi < N) s.terms.emplace_back(hi, Rational(sg * (6 * k + 1)));
        s.terms.emplace_back(lo, Rational(-sg * (6 * k - 1)));
    }
    s.normalize();
    return s;
}

namespace detail {

inline void push_scalar_terms(PotentialSpec& P, const Monomial& m, const Novikov& s,
                              bool derive_area) {
    for (auto& [e, c] : s.terms) {
        PotentialTerm t{m, e, c, std::nullopt};
        if (derive_area) {
            Rational area = e + 3 * m.deg();
            t.area = to_long(area);
        }
        P.terms.push_back(std::move(t));
    }
}

}  // namespace detail

inline PotentialSpec w_lead(const OrbifoldData& o) {
    PotentialSpec P;
    P.orb = o;
    P.prov = Provenance::Lead;
    P.degree_cap = std::max({o.a, o.b, o.c}) + 6;
    P.terms.push_back({{1, 1, 1}, -8, -1, 1});
    P.terms.push_back({{(int)o.a, 0, 0}, 0, 1, 3 * o.a});
    P.terms.push_back({{0, (int)o.b, 0}, 0, 1, 3 * o.b});
    P.terms.push_back({{0, 0, (int)o.c}, 0, 1, 3 * o.c});
    return P;
}

inline PotentialSpec w_333(const Rational& precision) {
    if (precision <= 0) throw std::invalid_argument("precision must be > 0");
    PotentialSpec P;
    P.orb = OrbifoldData(3, 3, 3);
    P.prov = Provenance::Closed333;
    P.t_precision = precision;
    P.degree_cap = 9;
    Novikov phi = phi_series(precision);
    Novikov psi = psi_series(precision);
    detail::push_scalar_terms(P, {3, 0, 0}, phi, true);
    detail::push_scalar_terms(P, {0, 3, 0}, phi, true);
    detail::push_scalar_terms(P, {0, 0, 3}, phi, true);
    detail::push_scalar_terms(P, {1, 1, 1}, -psi, true);
    return P;
}

inline PotentialSpec w_22r(long r, const Rational& lambda, std::vector<Rational> c,
                           const Rational& precision) {
    if (r < 2) throw std::invalid_argument("r must be >= 2");
    Rational bound = std::min(Rational(3), Rational(3 * r - 5, 2));
    if (!(lambda > 0 && lambda < bound))
        throw InvalidLambda("lambda must satisfy 0 < lambda < min(3,(3r-5)/2), got " +
                            rational_str(lambda));
    long kmax = r / 2;
    if (c.empty()) c.assign(kmax, Rational(1));
    if ((long)c.size() != kmax)
        throw std::invalid_argument("expected " + std::to_string(kmax) + " coefficients");
    for (auto& ck : c)
        if (ck == 0) throw std::invalid_argument("c_k must be units");
    PotentialSpec P;
    P.orb = OrbifoldData(2, 2, r);
    P.prov = Provenance::Param22r;
    P.t_precision = precision;
    P.degree_cap = r + 6;
    P.terms.push_back({{1, 1, 1}, -8, -1, 1});
    P.terms.push_back({{2, 0, 0}, 0, 1, 6});
    P.terms.push_back({{0, 2, 0}, 0, 1, 6});
    P.terms.push_back({{0, 0, (int)r}, 0, 1, 3 * r});
    for (long k = 1; k <= kmax; ++k)
        P.terms.push_back({{0, 0, (int)(r - 2 * k)}, 16 * k, c[k - 1],
                           16 * k + 3 * (r - 2 * k)});
    P.terms.push_back({{1, 0, 0}, lambda, 1, 3});
    P.terms.push_back({{0, 1, 0}, lambda, 1, 3});
    P.ages[{1, 0, 0}] = {Rational(1, 2)};
    P.ages[{0, 1, 0}] = {Rational(1, 2)};
    return P;
}

// Multiply every term of area m by t^m.  t must be a unit of valuation 0; a
// rational t keeps each stored term a single (monomial, exponent) entry.
inline PotentialSpec bulk_point_deform(const PotentialSpec& P, const Novikov& t) {
    if (t.terms.empty() || t.val() != 0)
        throw std::invalid_argument("point weight must be a unit of valuation 0");
    PotentialSpec Q = P;
    Q.terms.clear();
    for (auto& tm : P.terms) {
        if (!tm.area) throw MissingAreaLedger("term " + tm.mono.str() + " has no area");
        Novikov w = nov_pow(t, (unsigned long)*tm.area);
        for (auto& [e, cc] : w.terms)
            Q.terms.push_back({tm.mono, tm.t_exp + e, tm.coef * cc, tm.area});
        if (w.prec) Q.t_precision = opt_min(Q.t_precision, opt_add(w.prec, tm.t_exp));
    }
    return Q;
}

// Leading-form invariant: T^8 * series (standard frame) = -xi*xyz +
// T^8(x^a+y^b+z^c) + higher, with xi a unit of valuation 0 and the order-power
// coefficients exactly 1 at valuation 0.
inline Novikov leading_unit_xi(const PotentialSpec& P) {
    TateSeries W = P.series_xyz();
    Novikov cxyz = W.coeff({1, 1, 1});
    if (cxyz.terms.empty() || cxyz.val() != -8)
        throw LeadingTermMismatch("xyz coefficient must have valuation -8, got " +
                                  cxyz.str());
    Novikov xi = (-cxyz).shifted(8);
    Monomial orders[3] = {{(int)P.orb.a, 0, 0}, {0, (int)P.orb.b, 0}, {0, 0, (int)P.orb.c}};
    for (auto& m : orders) {
        Novikov cm = W.coeff(m);
        if (cm.coeff_at(0) != 1 || (cm.has_terms() && cm.val() < 0))
            throw LeadingTermMismatch("coefficient of " + m.str() +
                                      " must be 1 + higher order, got " + cm.str());
    }
    for (auto& [m, a] : W.c) {
        if (m == Monomial{1, 1, 1} || m == orders[0] || m == orders[1] || m == orders[2])
            continue;
        if (a.has_terms() && a.val() <= 0)
            throw LeadingTermMismatch("unexpected low-valuation term at " + m.str());
    }
    return xi;
}

inline std::vector<AreaCheckResult> validate_area_relations(const PotentialSpec& P) {
    std::vector<AreaCheckEntry> entries;
    for (auto& t : P.terms) {
        AreaCheckEntry e;
        e.mono = t.mono;
        if (t.area) {
            e.m = *t.area;
        } else {
            // Without a stored area, infer from the standard-frame exponent.
            Rational exp = t.t_exp - (P.frame == VariableFrame::tilde
                                          ? Rational(3 * t.mono.deg())
                                          : Rational(0));
            Rational m = exp + 3 * t.mono.deg();
            if (!is_integer(m)) throw MissingAreaLedger("cannot infer area of " + t.mono.str());
            e.m = to_long(m);
        }
        auto it = P.ages.find(t.mono);
        if (it != P.ages.end()) e.ages = it->second;
        entries.push_back(std::move(e));
    }
    return validate_area_relations(P.orb, entries);
}

// --- JSON schema ---------------------------------------------------------

inline nlohmann::json potential_to_json(const PotentialSpec& P) {
    nlohmann::json j;
    j["abc"] = {P.orb.a, P.orb.b, P.orb.c};
    j["frame"] = frame_str(P.frame);
    j["terms"] = nlohmann::json::array();
    for (auto& t : P.terms) {
        nlohmann::json jt;
        jt["i"] = t.mono.i;
        jt["j"] = t.mono.j;
        jt["k"] = t.mono.k;
        jt["t_exp"] = rational_str(t.t_exp);
        jt["coef"] = rational_str(t.coef);
        if (t.area) jt["area"] = *t.area;
        auto it = P.ages.find(t.mono);
        if (it != P.ages.end() && !it->second.empty()) {
            jt["ages"] = nlohmann::json::array();
            for (auto& a : it->second) jt["ages"].push_back(rational_str(a));
        }
        j["terms"].push_back(jt);
    }
    if (P.t_precision) j["t_precision"] = rational_str(*P.t_precision);
    j["degree_cap"] = P.degree_cap;
    return j;
}

inline PotentialSpec potential_from_json(const nlohmann::json& j) {
    PotentialSpec P;
    try {
        auto abc = j.at("abc");
        if (!abc.is_array() || abc.size() != 3) throw SchemaError("abc must be [a,b,c]");
        P.orb = OrbifoldData(abc[0].get<long>(), abc[1].get<long>(), abc[2].get<long>());
        std::string f = j.at("frame").get<std::string>();
        if (f == "xyz")
            P.frame = VariableFrame::xyz;
        else if (f == "tilde")
            P.frame = VariableFrame::tilde;
        else
            throw SchemaError("frame must be 'xyz' or 'tilde'");
        for (auto& jt : j.at("terms")) {
            PotentialTerm t;
            t.mono = {jt.at("i").get<int>(), jt.at("j").get<int>(), jt.at("k").get<int>()};
            if (t.mono.i < 0 || t.mono.j < 0 || t.mono.k < 0)
                throw SchemaError("negative exponent");
            t.t_exp = parse_rational(jt.at("t_exp").get<std::string>());
            t.coef = parse_rational(jt.at("coef").get<std::string>());
            if (jt.contains("area")) t.area = jt.at("area").get<long>();
            if (jt.contains("ages")) {
                std::vector<Rational> ages;
                for (auto& ja : jt.at("ages"))
                    ages.push_back(parse_rational(ja.get<std::string>()));
                P.ages[t.mono] = std::move(ages);
            }
            P.terms.push_back(std::move(t));
        }
        if (j.contains("t_precision"))
            P.t_precision = parse_rational(j.at("t_precision").get<std::string>());
        P.degree_cap = j.value("degree_cap", (long)(std::max({P.orb.a, P.orb.b, P.orb.c}) + 6));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed potential file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("malformed potential file: ") + e.what());
    }
    P.prov = Provenance::External;
    leading_unit_xi(P);  // LeadingTermMismatch on failure
    bool all_areas = true;
    for (auto& t : P.terms) all_areas = all_areas && t.area.has_value();
    if (all_areas) {
        for (auto& r : validate_area_relations(P))
            if (!r.pass)
                throw AreaRelationViolation("area relation fails for " + r.mono.str() +
                                            ": " + rational_str(r.lhs) +
                                            " != " + rational_str(r.rhs));
    }
    return P;
}

inline void save_potential(const PotentialSpec& P, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << potential_to_json(P).dump(2) << "\n";
}

inline PotentialSpec load_potential(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    return potential_from_json(j);
}

}  // namespace orb
