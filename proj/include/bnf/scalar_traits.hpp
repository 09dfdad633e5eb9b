#pragma once

// Uniform hooks the templated series/engine layers need from a coefficient
// scalar: string round-trip, zero test, approximate magnitude, t-degree,
// and lifting exact Radical values (frequencies, spec coefficients) into
// the working domain.

#include "bnf/mpfloat.hpp"
#include "bnf/scalar.hpp"
#include "bnf/tpoly.hpp"

namespace bnf {

template <class S> struct ScalarTraits;

template <> struct ScalarTraits<Radical> {
    static constexpr bool exact = true;
    static constexpr const char *name = "exact";
    static bool is_zero(const Radical &x) { return x.is_zero(); }
    static std::string str(const Radical &x) { return x.str(); }
    static Radical parse(std::string_view s) { return Radical::parse(s); }
    static Radical lift(const Radical &x) { return x; }
    static int tdegree(const Radical &) { return 0; }
};

template <> struct ScalarTraits<TPoly> {
    static constexpr bool exact = true;
    static constexpr const char *name = "param";
    static bool is_zero(const TPoly &x) { return x.is_zero(); }
    static std::string str(const TPoly &x) { return x.str(); }
    static TPoly parse(std::string_view s) { return TPoly::parse(s); }
    static TPoly lift(const Radical &x) { return TPoly(x); }
    static int tdegree(const TPoly &x) { return x.degree(); }
};

template <> struct ScalarTraits<CFloat> {
    static constexpr bool exact = false;
    static constexpr const char *name = "float";
    static bool is_zero(const CFloat &x) { return x.is_zero(); }
    static std::string str(const CFloat &x) { return x.str(); }
    static CFloat parse(std::string_view s) { return CFloat::parse(s); }
    static CFloat lift(const Radical &x) { return radical_to_cfloat(x); }
    static int tdegree(const CFloat &) { return 0; }

    static CFloat radical_to_cfloat(const Radical &x) {
        CFloat out;
        for (auto &[k, c] : x.terms()) {
            Real coeff = Real(numerator(c).str()) / Real(denominator(c).str());
            if (k == 1)
                out.re += coeff;
            else if (k > 0)
                out.re += coeff * sqrt(Real(k));
            else
                out.im += coeff * sqrt(Real(-k));
        }
        return out;
    }
};

// Approximate |x| as a double, for growth reports and divisor bookkeeping.
inline double abs_approx(const Radical &x) {
    double out = 0;
    for (auto &[k, c] : x.terms()) {
        double coeff = c.convert_to<double>();
        if (k > 0)
            out += coeff * std::sqrt(static_cast<double>(k));
        // imaginary parts contribute in quadrature below
    }
    double im = 0;
    for (auto &[k, c] : x.terms())
        if (k < 0)
            im += c.convert_to<double>() * std::sqrt(static_cast<double>(-k));
    return std::sqrt(out * out + im * im);
}

inline double abs_approx(const CFloat &x) { return x.abs().convert_to<double>(); }

inline double abs_approx(const TPoly &x) {
    // magnitude of the coefficient vector; only used for reporting
    double out = 0;
    for (auto &c : x.coeffs())
        out = std::max(out, abs_approx(c));
    return out;
}

} // namespace bnf
