#pragma once

// Univariate polynomials in the family parameter t, with exact Radical
// coefficients. Division is only defined by (effectively) constant
// polynomials: the homological divisors never depend on t.

#include "bnf/scalar.hpp"

#include <vector>

namespace bnf {

class TPoly {
  public:
    TPoly() = default;
    TPoly(long long v) : c_{Radical(v)} { trim(); }       // NOLINT
    TPoly(const Radical &v) : c_{v} { trim(); }           // NOLINT

    static TPoly t() {
        TPoly p;
        p.c_ = {Radical(0), Radical(1)};
        return p;
    }

    // degree in t; -1 for the zero polynomial
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<Radical> &coeffs() const { return c_; }

    Radical coeff(size_t i) const { return i < c_.size() ? c_[i] : Radical(0); }

    Radical eval(const Radical &t0) const {
        Radical r;
        for (size_t i = c_.size(); i-- > 0;)
            r = r * t0 + c_[i];
        return r;
    }

    TPoly operator-() const {
        TPoly r;
        r.c_.reserve(c_.size());
        for (auto &x : c_)
            r.c_.push_back(-x);
        return r;
    }

    TPoly &operator+=(const TPoly &o) {
        if (o.c_.size() > c_.size())
            c_.resize(o.c_.size());
        for (size_t i = 0; i < o.c_.size(); ++i)
            c_[i] += o.c_[i];
        trim();
        return *this;
    }
    TPoly &operator-=(const TPoly &o) {
        if (o.c_.size() > c_.size())
            c_.resize(o.c_.size());
        for (size_t i = 0; i < o.c_.size(); ++i)
            c_[i] -= o.c_[i];
        trim();
        return *this;
    }

    friend TPoly operator+(TPoly a, const TPoly &b) { return a += b; }
    friend TPoly operator-(TPoly a, const TPoly &b) { return a -= b; }

    friend TPoly operator*(const TPoly &a, const TPoly &b) {
        TPoly r;
        if (a.c_.empty() || b.c_.empty())
            return r;
        r.c_.assign(a.c_.size() + b.c_.size() - 1, Radical(0));
        for (size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].is_zero())
                continue;
            for (size_t j = 0; j < b.c_.size(); ++j)
                if (!b.c_[j].is_zero())
                    r.c_[i + j].add_mul(a.c_[i], b.c_[j]);
        }
        r.trim();
        return r;
    }
    TPoly &operator*=(const TPoly &o) { return *this = *this * o; }

    friend TPoly operator/(const TPoly &a, const TPoly &b) {
        if (b.is_zero())
            throw ScalarError("division by zero");
        if (b.degree() > 0)
            throw ScalarError("division by a t-dependent polynomial");
        Radical inv = b.c_[0].inverse();
        TPoly r = a;
        for (auto &x : r.c_)
            x *= inv;
        return r;
    }
    TPoly &operator/=(const TPoly &o) { return *this = *this / o; }

    friend bool operator==(const TPoly &a, const TPoly &b) { return a.c_ == b.c_; }
    friend bool operator!=(const TPoly &a, const TPoly &b) { return !(a == b); }

    // "(c0) + (c1)t + (c2)t^2", zero coefficients skipped
    std::string str() const {
        if (c_.empty())
            return "(0)";
        std::string out;
        for (size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].is_zero())
                continue;
            if (!out.empty())
                out += " + ";
            out += "(" + c_[i].str() + ")";
            if (i == 1)
                out += "t";
            else if (i > 1)
                out += "t^" + std::to_string(i);
        }
        return out.empty() ? "(0)" : out;
    }

    static TPoly parse(std::string_view s);

  private:
    std::vector<Radical> c_;

    void trim() {
        while (!c_.empty() && c_.back().is_zero())
            c_.pop_back();
    }
};

inline TPoly TPoly::parse(std::string_view s) {
    TPoly r;
    size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t'))
            ++pos;
    };
    for (;;) {
        skip_ws();
        if (pos >= s.size())
            break;
        if (s[pos] == '+') {
            ++pos;
            continue;
        }
        if (s[pos] != '(')
            throw ScalarError("bad t-polynomial literal: " + std::string(s));
        size_t depth = 1, start = ++pos;
        while (pos < s.size() && depth > 0) {
            if (s[pos] == '(')
                ++depth;
            else if (s[pos] == ')')
                --depth;
            ++pos;
        }
        if (depth != 0)
            throw ScalarError("unbalanced parens in t-polynomial literal");
        Radical c = Radical::parse(s.substr(start, pos - 1 - start));
        size_t power = 0;
        skip_ws();
        if (pos < s.size() && s[pos] == 't') {
            ++pos;
            power = 1;
            if (pos < s.size() && s[pos] == '^') {
                ++pos;
                size_t ds = pos;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                    ++pos;
                power = std::stoul(std::string(s.substr(ds, pos - ds)));
            }
        }
        TPoly term;
        term.c_.assign(power + 1, Radical(0));
        term.c_[power] = c;
        term.trim();
        r += term;
    }
    return r;
}

} // namespace bnf
