#pragma once

// Machine verification of the polynomial-degree bounds over affine pencils
// H_t = H0 + t (H1 - H0). The whole construction runs with coefficients in
// Q(radicals)[t], so t-degrees are tracked exactly, and an independent
// evaluate-and-interpolate oracle cross-checks the parameter layer.

#include "bnf/integrals.hpp"

#include <set>
#include <sstream>

namespace bnf {

struct PencilSpec {
    HamiltonianSpec base;      // H0
    HamiltonianSpec direction; // H1; same n, order, lambda

    void validate() const {
        if (base.n != direction.n || base.order != direction.order)
            throw SpecError("pencil members must share n and order");
        for (int k = 0; k < base.n; ++k)
            if (!(base.lambda.lambda[k] == direction.lambda.lambda[k]))
                throw SpecError("pencil members must share lambda");
    }
};

// spec for H_{t0} = H0 + t0 (H1 - H0), exact t0
inline HamiltonianSpec pencil_member(const PencilSpec &pencil, const Radical &t0) {
    HamiltonianSpec spec = pencil.base;
    GradedSeries<Radical> diff = pencil.direction.higher_terms - pencil.base.higher_terms;
    spec.higher_terms += diff.scaled(t0);
    return spec;
}

// higher terms of H_t over Q(radicals)[t]; every coefficient has t-degree <= 1
inline GradedSeries<TPoly> pencil_higher_terms(const PencilSpec &pencil) {
    GradedSeries<TPoly> out(pencil.base.n, pencil.base.order);
    for (auto &[l, p] : pencil.base.higher_terms.parts())
        for (auto &[e, c] : p)
            out.add_term(e, TPoly(c));
    GradedSeries<Radical> diff = pencil.direction.higher_terms - pencil.base.higher_terms;
    for (auto &[l, p] : diff.parts())
        for (auto &[e, c] : p)
            out.add_term(e, TPoly(c) * TPoly::t());
    return out;
}

inline NormalFormArtifacts<TPoly> normalize_pencil(const PencilSpec &pencil) {
    pencil.validate();
    const HamiltonianSpec &spec = pencil.base;
    GradedSeries<TPoly> H(spec.n, spec.order);
    for (int k = 0; k < spec.n; ++k) {
        Exponent e(2 * spec.n, 0);
        e[k] = 1;
        e[spec.n + k] = 1;
        H.add_term(e, TPoly(spec.lambda.lambda[k]));
    }
    H += pencil_higher_terms(pencil);
    return normalize_with<TPoly>(spec, H);
}

struct AuditRow {
    std::string object; // K, v, phi, psi, xi, eta, F=...
    int l = 0;          // homogeneous degree
    int k = 0;          // component index (0 for K, v, universal integrals)
    int observed = 0;   // max t-degree in the part (-1 when the part vanishes)
    int bound = 0;
    bool pass = true;
};

struct AuditReport {
    std::vector<AuditRow> rows;
    bool all_pass = true;

    void add(std::string object, int l, int k, int observed, int bound) {
        bool pass = observed <= bound;
        rows.push_back({std::move(object), l, k, observed, bound, pass});
        all_pass = all_pass && pass;
    }

    std::string csv() const {
        std::ostringstream os;
        os << "object,l,k,observed_deg,bound,verdict\n";
        for (auto &r : rows)
            os << r.object << ',' << r.l << ',' << r.k << ',' << r.observed << ',' << r.bound
               << ',' << (r.pass ? "PASS" : "FAIL") << "\n";
        return os.str();
    }
};

namespace detail {

inline int part_tdegree(const GradedSeries<TPoly> &s, int l) {
    int d = -1;
    if (auto *p = s.part(l))
        for (auto &[e, c] : *p)
            d = std::max(d, c.degree());
    return d;
}

} // namespace detail

struct AuditArtifacts {
    NormalFormArtifacts<TPoly> art;
    InverseMaps<TPoly> inv;
    std::vector<FirstIntegral<TPoly>> integrals;
    FirstIntegral<TPoly> omega1_squared;
};

inline AuditArtifacts audit_run(const PencilSpec &pencil) {
    if (check_nonresonant(pencil.base.lambda, pencil.base.order))
        throw SpecError("pencil frequencies are resonant up to the truncation order");
    AuditArtifacts out;
    out.art = normalize_pencil(pencil);
    out.inv = inverse_maps(out.art);
    out.integrals = first_integrals(out.inv, pencil.base.order);
    OmegaPoly F;
    std::vector<int> e(pencil.base.n, 0);
    e[0] = 2;
    F.terms[e] = Radical(1);
    out.omega1_squared = universal_integral(F, out.inv, pencil.base.order);
    out.omega1_squared.origin = "w1^2";
    return out;
}

// Bounds: deg_t K_l, v_l <= l-2; phi_{kl}, psi_{kl} <= l-1;
// xi_{kl}, eta_{kl} <= l-1; degree-l parts of universal integrals <= l-1.
inline AuditReport audit(const PencilSpec &pencil) {
    AuditArtifacts a = audit_run(pencil);
    int n = pencil.base.n, N = pencil.base.order;
    AuditReport rep;
    for (int l = 2; l <= N; ++l) {
        rep.add("K", l, 0, detail::part_tdegree(a.art.K, l), std::max(0, l - 2));
        rep.add("v", l, 0, detail::part_tdegree(a.art.v, l), std::max(0, l - 2));
        for (int k = 0; k < n; ++k) {
            if (l <= N - 1) {
                rep.add("phi", l, k + 1, detail::part_tdegree(a.art.phi[k], l), l - 1);
                rep.add("psi", l, k + 1, detail::part_tdegree(a.art.psi[k], l), l - 1);
            }
            rep.add("xi", l, k + 1, detail::part_tdegree(a.inv.xi[k], l), l - 1);
            rep.add("eta", l, k + 1, detail::part_tdegree(a.inv.eta[k], l), l - 1);
        }
        for (int k = 0; k < n; ++k)
            rep.add("F=w" + std::to_string(k + 1), l, 0,
                    detail::part_tdegree(a.integrals[k].P, l), l - 1);
        rep.add("F=w1^2", l, 0, detail::part_tdegree(a.omega1_squared.P, l), l - 1);
    }
    return rep;
}

// Exact fixed-t runs interpolated against the parameter-domain run; the
// anti-bug oracle for the whole parameter-ring layer. Bit-exact match
// required per K_l coefficient.
struct SpotCheckResult {
    bool match = true;
    std::string mismatch; // offending monomial, if any
};

inline SpotCheckResult spot_check_interpolation(const PencilSpec &pencil, int l,
                                                const std::vector<Rational> &samples) {
    if (static_cast<int>(samples.size()) < l)
        throw SpecError("need at least l sample points for degree " + std::to_string(l));
    for (size_t i = 0; i < samples.size(); ++i)
        for (size_t j = i + 1; j < samples.size(); ++j)
            if (samples[i] == samples[j])
                throw SpecError("interpolation nodes must be distinct");

    auto param_art = normalize_pencil(pencil);
    std::vector<GradedSeries<Radical>> fixed;
    fixed.reserve(samples.size());
    for (auto &t0 : samples)
        fixed.push_back(normalize<Radical>(pencil_member(pencil, Radical(t0))).K);

    std::set<Exponent> monos;
    if (auto *p = param_art.K.part(l))
        for (auto &[e, c] : *p)
            monos.insert(e);
    for (auto &K : fixed)
        if (auto *p = K.part(l))
            for (auto &[e, c] : *p)
                monos.insert(e);

    SpotCheckResult res;
    size_t m = samples.size();
    for (auto &e : monos) {
        // Lagrange interpolation through (samples[i], K_l coefficient)
        TPoly interp;
        for (size_t i = 0; i < m; ++i) {
            Radical yi = fixed[i].coeff(e);
            if (yi.is_zero())
                continue;
            TPoly basis{Radical(1)};
            Radical denom(1);
            for (size_t j = 0; j < m; ++j) {
                if (j == i)
                    continue;
                basis *= TPoly::t() - TPoly(Radical(samples[j]));
                denom *= Radical(samples[i]) - Radical(samples[j]);
            }
            interp += basis * TPoly(yi / denom);
        }
        if (!(interp == param_art.K.coeff(e))) {
            res.match = false;
            std::ostringstream os;
            os << "K_" << l << " monomial";
            for (int v : e)
                os << ' ' << v;
            res.mismatch = os.str();
            return res;
        }
    }
    return res;
}

// substitute t = t0 coefficientwise (evaluation homomorphism)
inline GradedSeries<Radical> evaluate_at(const GradedSeries<TPoly> &s, const Radical &t0) {
    return s.map_coeffs<Radical>([&](const TPoly &c) { return c.eval(t0); });
}

} // namespace bnf
