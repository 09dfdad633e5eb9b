#pragma once

// First integrals: invert the transformation to get (xi, eta) as series in
// (x, y), form P_k = xi_k eta_k and universal integrals F(omega), and
// split series into resonant/non-resonant parts. Bracket checks run
// against the ORIGINAL Hamiltonian in (x, y), never against K.

#include "bnf/engine.hpp"

namespace bnf {

template <class S> struct InverseMaps {
    int n = 0;
    int order = 0;
    std::vector<GradedSeries<S>> xi;  // xi_k(x, y) = x_k + ...
    std::vector<GradedSeries<S>> eta; // eta_k(x, y) = y_k + ...
};

template <class S> struct FirstIntegral {
    GradedSeries<S> P;  // in (x, y)
    std::string origin; // which F(omega) it represents
};

// eta solved by fixed-point iteration of eta_k = y_k - sum v_{l,x_k}(x, eta),
// then xi_k = x_k + sum v_{l,eta_k}(x, eta) directly.
template <class S> InverseMaps<S> inverse_maps(const NormalFormArtifacts<S> &art) {
    int n = art.n, N = art.order;
    InverseMaps<S> inv;
    inv.n = n;
    inv.order = N;
    GradedSeries<S> w = art.v - detail::identity_generator<S>(n, N);
    std::vector<GradedSeries<S>> w_x(n), w_eta(n);
    for (int k = 0; k < n; ++k) {
        w_x[k] = w.derivative(k);
        w_eta[k] = w.derivative(n + k);
    }
    std::vector<GradedSeries<S>> eta(n), subs(2 * n);
    for (int k = 0; k < n; ++k)
        eta[k] = GradedSeries<S>::variable(n, N, n + k);
    for (int r = 1; r <= N - 1; ++r) {
        int cut = std::min(N, r + 1);
        for (int k = 0; k < n; ++k) {
            subs[k] = GradedSeries<S>::variable(n, cut, k);
            subs[n + k] = eta[k].truncated(cut);
        }
        for (int k = 0; k < n; ++k)
            eta[k] = GradedSeries<S>::variable(n, N, n + k) -
                     compose_truncated(w_x[k].truncated(cut), subs, cut).truncated(N);
    }
    for (int k = 0; k < n; ++k) {
        subs[k] = GradedSeries<S>::variable(n, N, k);
        subs[n + k] = eta[k];
    }
    inv.eta = eta;
    inv.xi.resize(n);
    for (int k = 0; k < n; ++k)
        inv.xi[k] = GradedSeries<S>::variable(n, N, k) + compose_truncated(w_eta[k], subs, N);
    return inv;
}

template <class S>
std::vector<FirstIntegral<S>> first_integrals(const InverseMaps<S> &inv, int N) {
    std::vector<FirstIntegral<S>> out;
    out.reserve(inv.n);
    for (int k = 0; k < inv.n; ++k) {
        FirstIntegral<S> fi;
        fi.P = multiply_truncated(inv.xi[k], inv.eta[k], N);
        fi.origin = "w" + std::to_string(k + 1);
        out.push_back(std::move(fi));
    }
    return out;
}

// F as a sparse polynomial in the action symbols omega_1..omega_n
struct OmegaPoly {
    std::map<std::vector<int>, Radical> terms; // omega exponent -> coefficient

    int max_degree() const {
        int d = 0;
        for (auto &[e, c] : terms) {
            int s = 0;
            for (int v : e)
                s += v;
            d = std::max(d, s);
        }
        return d;
    }

    // "w1^2 + 3/2*w1*w2" style input
    static OmegaPoly parse(std::string_view s, int n);
};

inline OmegaPoly OmegaPoly::parse(std::string_view s, int n) {
    OmegaPoly F;
    size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t'))
            ++pos;
    };
    bool first = true;
    while (true) {
        skip_ws();
        if (pos >= s.size())
            break;
        Radical sign(1);
        if (s[pos] == '+') {
            ++pos;
        } else if (s[pos] == '-') {
            sign = Radical(-1);
            ++pos;
        } else if (!first) {
            throw ScalarError("expected + or - in omega polynomial");
        }
        first = false;
        // product of rational factors and w<k>[^e] factors
        Radical coeff = sign;
        std::vector<int> e(n, 0);
        bool expect_factor = true;
        while (expect_factor) {
            skip_ws();
            if (pos < s.size() && (s[pos] == 'w' || s[pos] == 'W')) {
                ++pos;
                size_t ds = pos;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                    ++pos;
                int idx = std::stoi(std::string(s.substr(ds, pos - ds)));
                if (idx < 1 || idx > n)
                    throw ScalarError("omega index out of range in F");
                int pw = 1;
                if (pos < s.size() && s[pos] == '^') {
                    ++pos;
                    ds = pos;
                    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                        ++pos;
                    pw = std::stoi(std::string(s.substr(ds, pos - ds)));
                }
                e[idx - 1] += pw;
            } else {
                size_t start = pos;
                while (pos < s.size() &&
                       (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '/'))
                    ++pos;
                if (pos == start)
                    throw ScalarError("bad factor in omega polynomial");
                coeff *= Radical(rat_parse(s.substr(start, pos - start)));
            }
            skip_ws();
            if (pos < s.size() && s[pos] == '*') {
                ++pos;
                continue;
            }
            expect_factor = false;
        }
        auto [it, fresh] = F.terms.emplace(e, coeff);
        if (!fresh)
            it->second += coeff;
    }
    for (auto it = F.terms.begin(); it != F.terms.end();)
        it = it->second.is_zero() ? F.terms.erase(it) : std::next(it);
    return F;
}

template <class S>
FirstIntegral<S> universal_integral(const OmegaPoly &F, const InverseMaps<S> &inv, int N) {
    if (2 * F.max_degree() > N)
        throw EngineError("omega-degree of F too high for truncation order");
    int n = inv.n;
    std::vector<GradedSeries<S>> P;
    P.reserve(n);
    for (int k = 0; k < n; ++k)
        P.push_back(multiply_truncated(inv.xi[k], inv.eta[k], N));
    FirstIntegral<S> out;
    out.P = GradedSeries<S>(n, N);
    for (auto &[e, c] : F.terms) {
        GradedSeries<S> term(n, N);
        term.add_term(Exponent(2 * n, 0), ScalarTraits<S>::lift(c));
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < e[k]; ++j)
                term = multiply_truncated(term, P[k], N);
        out.P += term;
    }
    return out;
}

// Lemma-style split of a series in (xi, eta): T = resonant monomials
// (a power series in the omega_k), J = everything else; T + J = Q.
template <class S>
std::pair<GradedSeries<S>, GradedSeries<S>> decompose_resonant(const GradedSeries<S> &Q) {
    return {Q.resonant_part(), Q.nonresonant_part()};
}

// Max |coefficient| of {P, H} per degree, trusted through order N-1.
template <class S>
std::map<int, double> bracket_residual(const GradedSeries<S> &P, const GradedSeries<S> &H,
                                       int N) {
    auto br = poisson_bracket(P, H, N - 1);
    std::map<int, double> out;
    for (int l = 0; l <= N - 1; ++l)
        out[l] = 0;
    for (auto &[l, p] : br.parts())
        for (auto &[e, c] : p)
            out[l] = std::max(out[l], abs_approx(c));
    return out;
}

// Leading (graded-lex first) non-resonant monomial of J and its divisor,
// mirroring the leading-term computation in the representation lemma.
template <class S>
std::optional<std::pair<Exponent, Radical>>
leading_nonresonant(const GradedSeries<S> &J, const FrequencyVector &fv) {
    for (auto &[l, p] : J.parts())
        for (auto &[e, c] : p)
            return std::make_pair(e, small_divisor(fv, e));
    return std::nullopt;
}

} // namespace bnf
