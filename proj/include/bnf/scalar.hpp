#pragma once

// Exact coefficient domains: rationals and rational combinations over a
// square-root basis. Radicands are kept square-free; sqrt(-1) is allowed
// (negative radicands carry the imaginary factor).

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bnf {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

struct ScalarError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string rat_str(const Rational &r) {
    if (denominator(r) == 1)
        return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational rat_parse(std::string_view s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos)
            return Rational(Integer(std::string(s)));
        Integer p{std::string(s.substr(0, slash))};
        Integer q{std::string(s.substr(slash + 1))};
        if (q == 0)
            throw ScalarError("zero denominator in rational literal");
        return Rational(p, q);
    } catch (const std::runtime_error &) {
        throw ScalarError("bad rational literal: " + std::string(s));
    }
}

// v = g^2 * s with s square-free (sign kept on s). Trial division.
inline void squarefree_split(long long v, long long &g, long long &s) {
    if (v == 0)
        throw ScalarError("sqrt(0) radicand");
    g = 1;
    long long sign = v < 0 ? -1 : 1;
    long long m = v < 0 ? -v : v;
    for (long long p = 2; p * p <= m; ++p) {
        while (m % (p * p) == 0) {
            m /= p * p;
            g *= p;
        }
    }
    s = sign * m;
}

// Element of Q(sqrt(d1),...,sqrt(dk)). Map key = square-free radicand
// (1 for the rational part, negative radicands absorb a factor of i).
class Radical {
  public:
    using Terms = std::map<long long, Rational>;

    Radical() = default;
    Radical(long long v) { set(1, Rational(v)); }            // NOLINT
    Radical(const Rational &v) { set(1, v); }                // NOLINT
    explicit Radical(long long num, long long den) { set(1, Rational(num, den)); }

    static Radical sqrt_of(long long d, const Rational &coeff = Rational(1)) {
        long long g, s;
        squarefree_split(d, g, s);
        Radical r;
        r.set(s, coeff * g);
        return r;
    }

    const Terms &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_rational() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 1);
    }
    Rational rational_part() const {
        auto it = terms_.find(1);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Radical operator-() const {
        Radical r;
        for (auto &[k, c] : terms_)
            r.terms_.emplace(k, -c);
        return r;
    }

    Radical &operator+=(const Radical &o) {
        for (auto &[k, c] : o.terms_) {
            auto [it, fresh] = terms_.try_emplace(k, c);
            if (!fresh) {
                it->second += c;
                if (it->second == 0)
                    terms_.erase(it);
            }
        }
        return *this;
    }
    Radical &operator-=(const Radical &o) {
        for (auto &[k, c] : o.terms_) {
            auto [it, fresh] = terms_.try_emplace(k, Rational(-c));
            if (!fresh) {
                it->second -= c;
                if (it->second == 0)
                    terms_.erase(it);
            }
        }
        return *this;
    }

    friend Radical operator+(Radical a, const Radical &b) { return a += b; }
    friend Radical operator-(Radical a, const Radical &b) { return a -= b; }

    // *this += a * b without intermediate Radicals; the workhorse of the
    // series and t-polynomial multiplies
    Radical &add_mul(const Radical &a, const Radical &b) {
        for (auto &[ka, ca] : a.terms_)
            for (auto &[kb, cb] : b.terms_) {
                auto [k, mult] = mul_keys(ka, kb);
                auto [it, fresh] = terms_.try_emplace(k);
                if (mult == 1)
                    it->second += ca * cb;
                else
                    it->second += ca * cb * mult;
                if (it->second == 0)
                    terms_.erase(it);
            }
        return *this;
    }

    friend Radical operator*(const Radical &a, const Radical &b) {
        if (a.is_rational() && b.is_rational()) {
            Radical r;
            if (!a.terms_.empty() && !b.terms_.empty()) {
                Rational p = a.terms_.begin()->second * b.terms_.begin()->second;
                if (p != 0)
                    r.terms_.emplace(1, std::move(p));
            }
            return r;
        }
        Radical r;
        r.add_mul(a, b);
        return r;
    }
    Radical &operator*=(const Radical &o) { return *this = *this * o; }

    Radical inverse() const {
        if (terms_.empty())
            throw ScalarError("division by zero");
        if (is_rational()) {
            Radical r;
            r.set(1, Rational(1) / terms_.begin()->second);
            return r;
        }
        // Peel one radical p via conjugation: x = A + sqrt(p) B, with
        // x * conj_p(x) = A^2 - p B^2 free of p. Recurse on the product.
        long long p = pick_radical();
        Radical conj;
        for (auto &[k, c] : terms_)
            conj.set(k, contains(k, p) ? -c : c);
        Radical prod = *this * conj;
        return conj * prod.inverse();
    }

    friend Radical operator/(const Radical &a, const Radical &b) { return a * b.inverse(); }
    Radical &operator/=(const Radical &o) { return *this = *this / o; }

    friend bool operator==(const Radical &a, const Radical &b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Radical &a, const Radical &b) { return !(a == b); }

    std::string str() const {
        if (terms_.empty())
            return "0";
        std::string out;
        bool first = true;
        for (auto &[k, c] : terms_) {
            if (!first)
                out += " + ";
            first = false;
            if (k == 1)
                out += rat_str(c);
            else
                out += rat_str(c) + "*sqrt(" + std::to_string(k) + ")";
        }
        return out;
    }

    // Parses the output of str(): sum of "p/q" and "p/q*sqrt(d)" terms.
    static Radical parse(std::string_view s);

  private:
    Terms terms_;

    Rational get(long long k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? Rational(0) : it->second;
    }
    void set(long long k, const Rational &v) {
        if (v == 0)
            terms_.erase(k);
        else
            terms_[k] = v;
    }

    static bool contains(long long key, long long p) {
        if (p == -1)
            return key < 0;
        long long a = key < 0 ? -key : key;
        return a % p == 0;
    }

    long long pick_radical() const {
        for (auto &[k, c] : terms_) {
            if (k < 0)
                return -1;
            if (k > 1) {
                for (long long p = 2; p * p <= k; ++p)
                    if (k % p == 0)
                        return p;
                return k;
            }
        }
        throw ScalarError("internal: no radical to peel");
    }

    // sqrt(a)*sqrt(b) for square-free a,b, with sqrt(x) = i*sqrt(|x|) for
    // x < 0. Returns (radicand, rational multiplier).
    static std::pair<long long, long long> mul_keys(long long a, long long b) {
        long long sa = a < 0 ? -1 : 1, sb = b < 0 ? -1 : 1;
        long long A = a * sa, B = b * sb;
        long long g = std::gcd(A, B);
        long long m = (A / g) * (B / g);
        if (sa < 0 && sb < 0)
            return {m, -g};
        if (sa < 0 || sb < 0)
            return {-m, g};
        return {m, g};
    }
};

namespace detail {

// Shared recursive-descent parser for scalar expressions: rationals and
// sqrt(d) combined with +, -, *, parentheses. Covers both the spec-file
// grammar and the dump coefficient format.
class ScalarExprParser {
  public:
    explicit ScalarExprParser(std::string_view s) : s_(s) {}

    Radical parse() {
        Radical r = expr();
        skip_ws();
        if (pos_ != s_.size())
            throw ScalarError("trailing input in scalar expression: " + std::string(s_));
        return r;
    }

  private:
    std::string_view s_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t'))
            ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    Radical expr() {
        Radical r = term();
        for (;;) {
            if (eat('+'))
                r += term();
            else if (eat('-'))
                r -= term();
            else
                return r;
        }
    }

    Radical term() {
        Radical r = factor();
        while (eat('*'))
            r *= factor();
        return r;
    }

    Radical factor() {
        if (eat('-'))
            return -factor();
        if (eat('(')) {
            Radical r = expr();
            if (!eat(')'))
                throw ScalarError("missing ')' in scalar expression");
            return r;
        }
        skip_ws();
        if (s_.compare(pos_, 5, "sqrt(") == 0) {
            pos_ += 5;
            bool neg = eat('-');
            long long d = integer();
            if (neg)
                d = -d;
            if (!eat(')'))
                throw ScalarError("missing ')' after sqrt radicand");
            return Radical::sqrt_of(d);
        }
        return Radical(rational());
    }

    long long integer() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ == start)
            throw ScalarError("expected integer in scalar expression");
        return std::stoll(std::string(s_.substr(start, pos_ - start)));
    }

    Rational rational() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        if (pos_ == start)
            throw ScalarError("expected number in scalar expression near '" +
                              std::string(s_.substr(pos_)) + "'");
        Integer num{std::string(s_.substr(start, pos_ - start))};
        if (peek() == '/') {
            ++pos_;
            skip_ws();
            size_t ds = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            if (pos_ == ds)
                throw ScalarError("expected denominator");
            Integer den{std::string(s_.substr(ds, pos_ - ds))};
            if (den == 0)
                throw ScalarError("zero denominator");
            return Rational(num, den);
        }
        return Rational(num);
    }
};

} // namespace detail

inline Radical Radical::parse(std::string_view s) { return detail::ScalarExprParser(s).parse(); }

inline Radical parse_scalar_expr(std::string_view s) { return detail::ScalarExprParser(s).parse(); }

} // namespace bnf
