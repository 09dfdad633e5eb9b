#pragma once

// Arbitrary-precision complex floats (MPFR backed) for numeric runs.
// Precision is a process-wide setting in bits; OpenMP worker threads must
// call apply_thread_precision() before touching Real values.

#include <boost/multiprecision/mpfr.hpp>

#include <atomic>
#include <string>

namespace bnf {

using Real = boost::multiprecision::mpfr_float;

inline std::atomic<unsigned> g_precision_bits{256};

inline unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>(bits * 0.30103) + 2;
}

inline void apply_thread_precision() {
    Real::default_precision(digits10_for_bits(g_precision_bits.load()));
}

inline void set_precision_bits(unsigned bits) {
    g_precision_bits.store(bits);
    Real::default_precision(digits10_for_bits(bits));
    apply_thread_precision();
}

struct CFloat {
    Real re, im;

    CFloat() : re(0), im(0) {}
    CFloat(long long v) : re(v), im(0) {}          // NOLINT
    CFloat(Real r) : re(std::move(r)), im(0) {}    // NOLINT
    CFloat(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return re == 0 && im == 0; }

    CFloat operator-() const { return {-re, -im}; }
    CFloat &operator+=(const CFloat &o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    CFloat &operator-=(const CFloat &o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend CFloat operator+(CFloat a, const CFloat &b) { return a += b; }
    friend CFloat operator-(CFloat a, const CFloat &b) { return a -= b; }
    friend CFloat operator*(const CFloat &a, const CFloat &b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    CFloat &operator*=(const CFloat &o) { return *this = *this * o; }
    friend CFloat operator/(const CFloat &a, const CFloat &b) {
        Real d = b.re * b.re + b.im * b.im;
        if (d == 0)
            throw std::runtime_error("complex division by zero");
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }
    CFloat &operator/=(const CFloat &o) { return *this = *this / o; }

    friend bool operator==(const CFloat &a, const CFloat &b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const CFloat &a, const CFloat &b) { return !(a == b); }

    Real abs() const { return sqrt(re * re + im * im); }

    std::string str() const {
        unsigned d = digits10_for_bits(g_precision_bits.load());
        if (im == 0)
            return re.str(d);
        return re.str(d) + " + " + im.str(d) + "*i";
    }

    static CFloat parse(std::string_view s) {
        auto star = s.rfind("*i");
        if (star == std::string_view::npos)
            return CFloat(Real(std::string(s)));
        auto plus = s.rfind(" + ", star);
        if (plus == std::string_view::npos)
            throw std::runtime_error("bad complex literal: " + std::string(s));
        return {Real(std::string(s.substr(0, plus))),
                Real(std::string(s.substr(plus + 3, star - plus - 3)))};
    }
};

} // namespace bnf
