#pragma once

// Hamiltonian spec files: parsing, validation, and the non-resonance
// check. The quadratic part is always sum lambda_k x_k y_k; anything
// quadratic outside the lambda lines is rejected.
//
// Grammar (line oriented):
//   n = <int>
//   order = <int>
//   radicals = d1 d2 ...          (square-free positive ints, optional -1)
//   lambda <k> = <scalar-expr>
//   mode = phi | zero
//   domain = exact | param | float<bits>
//   term x1^a1 ... yn^bn = <scalar-expr>

#include "bnf/series.hpp"

#include <fstream>
#include <optional>
#include <sstream>

namespace bnf {

struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class NormalizationMode { Phi, Zero };
enum class ScalarDomain { Exact, Param, Float };

struct FrequencyVector {
    std::vector<Radical> lambda;

    int dof() const { return static_cast<int>(lambda.size()); }
};

struct HamiltonianSpec {
    int n = 0;
    int order = 0;
    FrequencyVector lambda;
    GradedSeries<Radical> higher_terms; // degrees 3..order, in (x,y)
    NormalizationMode mode = NormalizationMode::Phi;
    ScalarDomain domain = ScalarDomain::Exact;
    unsigned float_bits = 256;
    std::vector<long long> radicals;
};

// exact divisor sum lambda_k (alpha_k - beta_k)
inline Radical small_divisor(const FrequencyVector &fv, const Exponent &e) {
    int n = fv.dof();
    Radical d;
    for (int k = 0; k < n; ++k)
        d += fv.lambda[k] * Radical(e[k] - e[n + k]);
    return d;
}

struct ResonanceWitness {
    Exponent exponent; // (alpha, beta) concatenated
};

// PASS = nullopt; FAIL returns the graded-lex first (alpha,beta) with
// alpha != beta, |alpha|+|beta| <= N, and sum lambda_k(alpha_k-beta_k) = 0.
// Only difference vectors m = alpha - beta are enumerated; a resonant m
// yields the minimal witness alpha = max(m,0), beta = max(-m,0).
inline std::optional<ResonanceWitness> check_nonresonant(const FrequencyVector &fv, int N) {
    int n = fv.dof();
    std::vector<int> m(n, 0);
    std::optional<Exponent> best;
    auto consider = [&](const std::vector<int> &mv) {
        Radical d;
        for (int k = 0; k < n; ++k)
            d += fv.lambda[k] * Radical(mv[k]);
        if (!d.is_zero())
            return;
        Exponent e(2 * n, 0);
        for (int k = 0; k < n; ++k) {
            if (mv[k] > 0)
                e[k] = mv[k];
            else
                e[n + k] = -mv[k];
        }
        int deg = exp_degree(e);
        if (!best || deg < exp_degree(*best) || (deg == exp_degree(*best) && e < *best))
            best = e;
    };
    // enumerate all m with 0 < |m|_1 <= N
    std::function<void(int, int)> rec = [&](int k, int budget) {
        if (k == n) {
            bool nonzero = false;
            for (int v : m)
                nonzero |= v != 0;
            if (nonzero)
                consider(m);
            return;
        }
        for (int v = -budget; v <= budget; ++v) {
            m[k] = v;
            rec(k + 1, budget - std::abs(v));
        }
        m[k] = 0;
    };
    rec(0, N);
    if (best)
        return ResonanceWitness{*best};
    return std::nullopt;
}

namespace detail {

inline Exponent parse_term_vars(std::istringstream &ls, int n, int lineno) {
    Exponent e(2 * n, 0);
    std::string tok;
    while (ls >> tok) {
        if (tok == "=")
            return e;
        char block = tok[0];
        if (block != 'x' && block != 'y')
            throw SpecError("line " + std::to_string(lineno) + ": bad variable token '" + tok +
                            "'");
        auto caret = tok.find('^');
        int idx, pw = 1;
        try {
            idx = std::stoi(tok.substr(1, caret == std::string::npos ? std::string::npos
                                                                     : caret - 1));
            if (caret != std::string::npos)
                pw = std::stoi(tok.substr(caret + 1));
        } catch (const std::exception &) {
            throw SpecError("line " + std::to_string(lineno) + ": bad variable token '" + tok +
                            "'");
        }
        if (idx < 1 || idx > n)
            throw SpecError("line " + std::to_string(lineno) + ": variable index out of range");
        if (pw < 0)
            throw SpecError("line " + std::to_string(lineno) + ": negative exponent");
        e[(block == 'x' ? 0 : n) + (idx - 1)] += pw;
    }
    throw SpecError("line " + std::to_string(lineno) + ": term line missing '='");
}

} // namespace detail

inline HamiltonianSpec parse_spec(std::istream &is) {
    HamiltonianSpec spec;
    std::string line;
    int lineno = 0;
    bool have_n = false, have_order = false;
    std::map<int, Radical> lambda_by_index;
    std::vector<std::pair<Exponent, Radical>> pending_terms;
    std::vector<std::pair<int, Exponent>> term_lines; // for error reporting

    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key))
            continue;
        auto rest_after_eq = [&]() -> std::string {
            std::string eq;
            ls >> eq;
            if (eq != "=")
                throw SpecError("line " + std::to_string(lineno) + ": expected '='");
            std::string rest;
            std::getline(ls, rest);
            return rest;
        };
        try {
            if (key == "n") {
                spec.n = std::stoi(rest_after_eq());
                if (spec.n < 1)
                    throw SpecError("n must be positive");
                have_n = true;
            } else if (key == "order") {
                spec.order = std::stoi(rest_after_eq());
                if (spec.order < 2)
                    throw SpecError("order must be >= 2");
                have_order = true;
            } else if (key == "radicals") {
                std::string eq;
                ls >> eq;
                if (eq != "=")
                    throw SpecError("expected '='");
                long long d;
                while (ls >> d) {
                    if (d != -1 && d < 2)
                        throw SpecError("radicand must be -1 or a square-free integer >= 2");
                    long long g, s;
                    squarefree_split(d, g, s);
                    if (g != 1)
                        throw SpecError("radicand " + std::to_string(d) + " is not square-free");
                    for (long long prev : spec.radicals)
                        if (prev == d)
                            throw SpecError("duplicate radical declaration " + std::to_string(d));
                    spec.radicals.push_back(d);
                }
            } else if (key == "lambda") {
                int k;
                if (!(ls >> k))
                    throw SpecError("lambda line missing index");
                Radical v = parse_scalar_expr(rest_after_eq());
                if (v.is_zero())
                    throw SpecError("lambda_" + std::to_string(k) + " must be nonzero");
                if (lambda_by_index.count(k))
                    throw SpecError("duplicate lambda index " + std::to_string(k));
                lambda_by_index[k] = v;
            } else if (key == "mode") {
                std::string m = rest_after_eq();
                std::istringstream ms(m);
                ms >> m;
                if (m == "phi")
                    spec.mode = NormalizationMode::Phi;
                else if (m == "zero")
                    spec.mode = NormalizationMode::Zero;
                else
                    throw SpecError("mode must be 'phi' or 'zero'");
            } else if (key == "domain") {
                std::string d = rest_after_eq();
                std::istringstream dsm(d);
                dsm >> d;
                if (d == "exact")
                    spec.domain = ScalarDomain::Exact;
                else if (d == "param")
                    spec.domain = ScalarDomain::Param;
                else if (d.rfind("float", 0) == 0) {
                    spec.domain = ScalarDomain::Float;
                    if (d.size() > 5)
                        spec.float_bits = std::stoul(d.substr(5));
                } else
                    throw SpecError("domain must be exact, param, or float<bits>");
            } else if (key == "term") {
                if (!have_n)
                    throw SpecError("term line before 'n ='");
                Exponent e = detail::parse_term_vars(ls, spec.n, lineno);
                std::string rest;
                std::getline(ls, rest);
                Radical c = parse_scalar_expr(rest);
                pending_terms.emplace_back(e, c);
                term_lines.emplace_back(lineno, e);
            } else {
                throw SpecError("unknown key '" + key + "'");
            }
        } catch (const ScalarError &err) {
            throw SpecError("line " + std::to_string(lineno) + ": " + err.what());
        }
    }

    if (!have_n || !have_order)
        throw SpecError("spec must declare n and order");
    if (static_cast<int>(lambda_by_index.size()) != spec.n)
        throw SpecError("expected " + std::to_string(spec.n) + " lambda lines, got " +
                        std::to_string(lambda_by_index.size()));
    spec.lambda.lambda.resize(spec.n);
    for (int k = 1; k <= spec.n; ++k) {
        auto it = lambda_by_index.find(k);
        if (it == lambda_by_index.end())
            throw SpecError("missing lambda " + std::to_string(k));
        spec.lambda.lambda[k - 1] = it->second;
    }

    spec.higher_terms = GradedSeries<Radical>(spec.n, spec.order);
    for (size_t i = 0; i < pending_terms.size(); ++i) {
        auto &[e, c] = pending_terms[i];
        int deg = exp_degree(e);
        if (deg <= 2)
            throw SpecError("line " + std::to_string(term_lines[i].first) +
                            ": quadratic and lower terms must live in the lambda lines");
        spec.higher_terms.add_term(e, c);
    }
    return spec;
}

inline HamiltonianSpec parse_spec_file(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        throw SpecError("cannot open spec file " + path);
    return parse_spec(f);
}

// Full H = sum lambda_k x_k y_k + higher terms, lifted to the scalar
// domain S and truncated at `order`.
template <class S> GradedSeries<S> build_hamiltonian(const HamiltonianSpec &spec, int order) {
    GradedSeries<S> H(spec.n, order);
    for (int k = 0; k < spec.n; ++k) {
        Exponent e(2 * spec.n, 0);
        e[k] = 1;
        e[spec.n + k] = 1;
        H.add_term(e, ScalarTraits<S>::lift(spec.lambda.lambda[k]));
    }
    for (auto &[l, p] : spec.higher_terms.parts()) {
        if (l > order)
            break;
        for (auto &[e, c] : p)
            H.add_term(e, ScalarTraits<S>::lift(c));
    }
    return H;
}

} // namespace bnf
