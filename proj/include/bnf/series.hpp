#pragma once

// Sparse graded series in 2n variables (x_1..x_n, y_1..y_n), truncated at a
// fixed total degree. Terms live in per-degree maps keyed by the exponent
// vector, so canonical iteration order is graded lexicographic for free.
//
// multiply_truncated comes in an OpenMP flavour (parallel over output
// degrees, bit-identical to the serial reference) and a serial reference
// used by the tests and the benchmark.

#include "bnf/scalar_traits.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace bnf {

struct SeriesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Exponent = std::vector<int>;

inline int exp_degree(const Exponent &e) {
    int d = 0;
    for (int v : e)
        d += v;
    return d;
}

// alpha == beta componentwise
inline bool exp_resonant(const Exponent &e) {
    size_t n = e.size() / 2;
    for (size_t k = 0; k < n; ++k)
        if (e[k] != e[n + k])
            return false;
    return true;
}

template <class S> class GradedSeries {
  public:
    using TermMap = std::map<Exponent, S>;
    using PartMap = std::map<int, TermMap>;

    GradedSeries() = default;
    GradedSeries(int n, int trunc) : n_(n), trunc_(trunc) {}

    // the single degree-1 monomial for variable `var` (0..2n-1)
    static GradedSeries variable(int n, int trunc, int var) {
        GradedSeries s(n, trunc);
        Exponent e(2 * n, 0);
        e[var] = 1;
        s.add_term(e, S(1));
        return s;
    }

    int dof() const { return n_; }
    int nvars() const { return 2 * n_; }
    int trunc() const { return trunc_; }
    void set_trunc(int t) {
        trunc_ = t;
        parts_.erase(parts_.upper_bound(t), parts_.end());
    }

    const PartMap &parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }

    size_t term_count() const {
        size_t c = 0;
        for (auto &[l, p] : parts_)
            c += p.size();
        return c;
    }

    int min_degree() const { return parts_.empty() ? trunc_ + 1 : parts_.begin()->first; }
    int max_degree() const { return parts_.empty() ? -1 : parts_.rbegin()->first; }

    const TermMap *part(int l) const {
        auto it = parts_.find(l);
        return it == parts_.end() ? nullptr : &it->second;
    }

    void set_part(int l, TermMap p) {
        if (l > trunc_)
            throw SeriesError("part degree beyond truncation order");
        for (auto it = p.begin(); it != p.end();) {
            if (exp_degree(it->first) != l)
                throw SeriesError("off-degree exponent in part");
            if (ScalarTraits<S>::is_zero(it->second))
                it = p.erase(it);
            else
                ++it;
        }
        if (p.empty())
            parts_.erase(l);
        else
            parts_[l] = std::move(p);
    }

    void clear_part(int l) { parts_.erase(l); }

    S coeff(const Exponent &e) const {
        auto it = parts_.find(exp_degree(e));
        if (it == parts_.end())
            return S(0);
        auto jt = it->second.find(e);
        return jt == it->second.end() ? S(0) : jt->second;
    }

    void add_term(const Exponent &e, const S &c) {
        if (static_cast<int>(e.size()) != 2 * n_)
            throw SeriesError("exponent arity mismatch");
        if (ScalarTraits<S>::is_zero(c))
            return;
        int d = exp_degree(e);
        if (d > trunc_)
            return;
        auto &slot = parts_[d][e];
        slot += c;
        if (ScalarTraits<S>::is_zero(slot)) {
            parts_[d].erase(e);
            if (parts_[d].empty())
                parts_.erase(d);
        }
    }

    GradedSeries operator-() const {
        GradedSeries r(n_, trunc_);
        for (auto &[l, p] : parts_)
            for (auto &[e, c] : p)
                r.parts_[l].emplace(e, -c);
        return r;
    }

    GradedSeries &operator+=(const GradedSeries &o) {
        require_same_arity(o);
        if (o.trunc_ < trunc_)
            set_trunc(o.trunc_);
        for (auto &[l, p] : o.parts_) {
            if (l > trunc_)
                break;
            for (auto &[e, c] : p)
                add_term(e, c);
        }
        return *this;
    }
    GradedSeries &operator-=(const GradedSeries &o) {
        require_same_arity(o);
        if (o.trunc_ < trunc_)
            set_trunc(o.trunc_);
        for (auto &[l, p] : o.parts_) {
            if (l > trunc_)
                break;
            for (auto &[e, c] : p)
                add_term(e, -c);
        }
        return *this;
    }
    friend GradedSeries operator+(GradedSeries a, const GradedSeries &b) { return a += b; }
    friend GradedSeries operator-(GradedSeries a, const GradedSeries &b) { return a -= b; }

    GradedSeries scaled(const S &c) const {
        GradedSeries r(n_, trunc_);
        for (auto &[l, p] : parts_)
            for (auto &[e, v] : p)
                r.add_term(e, v * c);
        return r;
    }

    // d/dvar, degree-lowering; truncation order is kept
    GradedSeries derivative(int var) const {
        GradedSeries r(n_, trunc_);
        for (auto &[l, p] : parts_)
            for (auto &[e, c] : p) {
                if (e[var] == 0)
                    continue;
                Exponent d = e;
                d[var] -= 1;
                r.add_term(d, c * S(e[var]));
            }
        return r;
    }

    GradedSeries truncated(int N) const {
        GradedSeries r = *this;
        r.set_trunc(std::min(N, trunc_));
        r.trunc_ = N;
        return r;
    }

    // keep only resonant (alpha == beta) monomials
    GradedSeries resonant_part() const {
        GradedSeries r(n_, trunc_);
        for (auto &[l, p] : parts_)
            for (auto &[e, c] : p)
                if (exp_resonant(e))
                    r.add_term(e, c);
        return r;
    }

    GradedSeries nonresonant_part() const {
        GradedSeries r(n_, trunc_);
        for (auto &[l, p] : parts_)
            for (auto &[e, c] : p)
                if (!exp_resonant(e))
                    r.add_term(e, c);
        return r;
    }

    // canonical-form walk: no zero coefficients, no off-degree keys,
    // nothing beyond the truncation order
    bool validate() const {
        for (auto &[l, p] : parts_) {
            if (l > trunc_ || p.empty())
                return false;
            for (auto &[e, c] : p) {
                if (static_cast<int>(e.size()) != 2 * n_)
                    return false;
                if (exp_degree(e) != l)
                    return false;
                if (ScalarTraits<S>::is_zero(c))
                    return false;
            }
        }
        return true;
    }

    friend bool operator==(const GradedSeries &a, const GradedSeries &b) {
        return a.n_ == b.n_ && a.parts_ == b.parts_;
    }
    friend bool operator!=(const GradedSeries &a, const GradedSeries &b) { return !(a == b); }

    template <class T, class F> GradedSeries<T> map_coeffs(F &&f) const {
        GradedSeries<T> r(n_, trunc_);
        for (auto &[l, p] : parts_)
            for (auto &[e, c] : p)
                r.add_term(e, f(c));
        return r;
    }

    void require_same_arity(const GradedSeries &o) const {
        if (n_ != o.n_)
            throw SeriesError("variable-count mismatch");
    }

    PartMap &mutable_parts() { return parts_; }

  private:
    int n_ = 0;
    int trunc_ = 0;
    PartMap parts_;
};

namespace detail {

// one output degree of a product; deterministic accumulation order
template <class S>
void multiply_degree(const GradedSeries<S> &a, const GradedSeries<S> &b, int d,
                     typename GradedSeries<S>::TermMap &out) {
    for (auto &[p, pa] : a.parts()) {
        if (p > d)
            break;
        auto *pb = b.part(d - p);
        if (!pb)
            continue;
        for (auto &[ea, ca] : pa)
            for (auto &[eb, cb] : *pb) {
                Exponent e(ea.size());
                for (size_t i = 0; i < e.size(); ++i)
                    e[i] = ea[i] + eb[i];
                S prod = ca * cb;
                auto [it, fresh] = out.try_emplace(e, prod);
                if (!fresh) {
                    it->second += prod;
                    if (ScalarTraits<S>::is_zero(it->second))
                        out.erase(it);
                }
            }
    }
}

} // namespace detail

template <class S>
GradedSeries<S> multiply_truncated_serial(const GradedSeries<S> &a, const GradedSeries<S> &b,
                                          int N) {
    a.require_same_arity(b);
    GradedSeries<S> r(a.dof(), N);
    if (a.empty() || b.empty())
        return r;
    int lo = a.min_degree() + b.min_degree();
    int hi = std::min(N, a.max_degree() + b.max_degree());
    for (int d = lo; d <= hi; ++d) {
        typename GradedSeries<S>::TermMap out;
        detail::multiply_degree(a, b, d, out);
        if (!out.empty())
            r.set_part(d, std::move(out));
    }
    return r;
}

template <class S>
GradedSeries<S> multiply_truncated(const GradedSeries<S> &a, const GradedSeries<S> &b, int N) {
    a.require_same_arity(b);
    GradedSeries<S> r(a.dof(), N);
    if (a.empty() || b.empty())
        return r;
    int lo = a.min_degree() + b.min_degree();
    int hi = std::min(N, a.max_degree() + b.max_degree());
    if (hi < lo)
        return r;
    int count = hi - lo + 1;
    std::vector<typename GradedSeries<S>::TermMap> outs(count);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < count; ++i) {
#ifdef _OPENMP
        apply_thread_precision();
#endif
        detail::multiply_degree(a, b, lo + i, outs[i]);
    }
    for (int i = 0; i < count; ++i)
        if (!outs[i].empty())
            r.set_part(lo + i, std::move(outs[i]));
    return r;
}

namespace detail {

// Recursive Horner evaluation of f at the substitution tuple: peel the
// variables one by one, so the number of series multiplies tracks the
// monomial prefix tree instead of the monomial count.
template <class S> struct ComposeCtx {
    const std::vector<GradedSeries<S>> *subs;
    int n;
    int N;
};

template <class S>
GradedSeries<S> compose_rec(const ComposeCtx<S> &ctx,
                            const std::vector<std::pair<const Exponent *, const S *>> &terms,
                            size_t lo, size_t hi, int var) {
    GradedSeries<S> res(ctx.n, ctx.N);
    if (var == 2 * ctx.n) {
        // fully consumed: sum the coefficients into a degree-0 term
        S c(0);
        for (size_t i = lo; i < hi; ++i)
            c += *terms[i].second;
        res.add_term(Exponent(2 * ctx.n, 0), c);
        return res;
    }
    // terms are sorted descending in the exponent of `var` within [lo,hi)
    size_t i = lo;
    int cur_pow = -1;
    bool started = false;
    while (i < hi) {
        int a = (*terms[i].first)[var];
        size_t j = i;
        while (j < hi && (*terms[j].first)[var] == a)
            ++j;
        if (!started) {
            res = compose_rec(ctx, terms, i, j, var + 1);
            started = true;
        } else {
            for (int k = 0; k < cur_pow - a; ++k)
                res = multiply_truncated(res, (*ctx.subs)[var], ctx.N);
            res += compose_rec(ctx, terms, i, j, var + 1);
        }
        cur_pow = a;
        i = j;
    }
    for (int k = 0; k < cur_pow; ++k)
        res = multiply_truncated(res, (*ctx.subs)[var], ctx.N);
    return res;
}

} // namespace detail

template <class S>
GradedSeries<S> compose_truncated(const GradedSeries<S> &f,
                                  const std::vector<GradedSeries<S>> &subs, int N) {
    if (static_cast<int>(subs.size()) != f.nvars())
        throw SeriesError("substitution arity mismatch");
    for (auto &s : subs) {
        if (s.dof() != f.dof())
            throw SeriesError("variable-count mismatch in substitution");
        if (!s.empty() && s.min_degree() < 1)
            throw SeriesError("substitution with a constant part breaks the grading");
    }
    // flatten, ordered so each recursion level sees descending exponents
    std::vector<std::pair<const Exponent *, const S *>> terms;
    for (auto &[l, p] : f.parts()) {
        // a degree-l monomial composed with degree >= 1 substitutions only
        // produces terms of degree >= l
        if (l > N)
            break;
        for (auto &[e, c] : p)
            terms.emplace_back(&e, &c);
    }
    std::sort(terms.begin(), terms.end(),
              [](const auto &a, const auto &b) { return *a.first > *b.first; });
    if (terms.empty())
        return GradedSeries<S>(f.dof(), N);
    detail::ComposeCtx<S> ctx{&subs, f.dof(), N};
    return detail::compose_rec(ctx, terms, 0, terms.size(), 0);
}

// identity substitution tuple in the series' own variables
template <class S> std::vector<GradedSeries<S>> identity_subs(int n, int trunc) {
    std::vector<GradedSeries<S>> subs;
    subs.reserve(2 * n);
    for (int v = 0; v < 2 * n; ++v)
        subs.push_back(GradedSeries<S>::variable(n, trunc, v));
    return subs;
}

// {f,g} = sum_k (df/dx_k dg/dy_k - df/dy_k dg/dx_k), truncated at N.
// The result may contain degree-0 and degree-1 parts.
template <class S>
GradedSeries<S> poisson_bracket(const GradedSeries<S> &f, const GradedSeries<S> &g, int N) {
    f.require_same_arity(g);
    int n = f.dof();
    GradedSeries<S> r(n, N);
    for (int k = 0; k < n; ++k) {
        r += multiply_truncated(f.derivative(k), g.derivative(n + k), N);
        r -= multiply_truncated(f.derivative(n + k), g.derivative(k), N);
    }
    return r;
}

// exact t-degree of every stored coefficient (parameter domain)
inline std::map<Exponent, int> param_degree(const GradedSeries<TPoly> &s) {
    std::map<Exponent, int> out;
    for (auto &[l, p] : s.parts())
        for (auto &[e, c] : p)
            out.emplace(e, c.degree());
    return out;
}

} // namespace bnf
