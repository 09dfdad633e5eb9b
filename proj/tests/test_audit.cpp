#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bnf/audit.hpp"

#include <sstream>

using namespace bnf;

namespace {

HamiltonianSpec spec_of(const std::string &text) {
    std::istringstream is(text);
    return parse_spec(is);
}

PencilSpec pencil_of(const std::string &base, const std::string &direction) {
    return {spec_of(base), spec_of(direction)};
}

} // namespace

TEST_CASE("pencil validation") {
    auto bad = pencil_of("n = 1\norder = 6\nlambda 1 = 1\n",
                         "n = 1\norder = 6\nlambda 1 = 2\n");
    CHECK_THROWS_AS(bad.validate(), SpecError);
    auto bad2 = pencil_of("n = 1\norder = 6\nlambda 1 = 1\n",
                          "n = 1\norder = 8\nlambda 1 = 1\n");
    CHECK_THROWS_AS(bad2.validate(), SpecError);
}

TEST_CASE("pencil plumbing: members and parameter lift") {
    auto pencil = pencil_of("n = 1\norder = 6\nlambda 1 = 1\nterm x1^3 = 1\n",
                            "n = 1\norder = 6\nlambda 1 = 1\nterm x1^3 = 3\nterm y1^3 = 2\n");
    auto mid = pencil_member(pencil, Radical(1, 2));
    CHECK(mid.higher_terms.coeff({3, 0}) == Radical(2));   // 1 + (1/2)(3-1)
    CHECK(mid.higher_terms.coeff({0, 3}) == Radical(1));   // 0 + (1/2)(2-0)

    auto lifted = pencil_higher_terms(pencil);
    CHECK(lifted.coeff({3, 0}) == TPoly(1) + TPoly(2) * TPoly::t());
    CHECK(lifted.coeff({0, 3}) == TPoly(2) * TPoly::t());
}

TEST_CASE("constant pencil: every coefficient is t-free") {
    std::string s = "n = 1\norder = 6\nlambda 1 = 1\nterm x1^3 = 1\nterm y1^3 = 1\n";
    auto pencil = pencil_of(s, s);
    auto rep = audit(pencil);
    CHECK(rep.all_pass);
    for (auto &r : rep.rows)
        CHECK(r.observed <= 0);
}

TEST_CASE("audit: cubic pencil in x only normalizes exactly") {
    auto pencil = pencil_of("n = 1\norder = 8\nlambda 1 = 1\n",
                            "n = 1\norder = 8\nlambda 1 = 1\nterm x1^3 = 1\n");
    auto a = audit_run(pencil);
    // H_t = x(y + t x^2) is exactly normal: K = xi eta, nothing else
    CHECK(a.art.K.term_count() == 1);
    auto rep = audit(pencil);
    CHECK(rep.all_pass);
    // K rows report an empty part as observed degree -1
    for (auto &r : rep.rows)
        if (r.object == "K" && r.l > 2)
            CHECK(r.observed == -1);
}

TEST_CASE("audit: symmetric cubic pencil attains the K_4 bound") {
    auto pencil = pencil_of("n = 1\norder = 8\nlambda 1 = 1\n",
                            "n = 1\norder = 8\nlambda 1 = 1\nterm x1^3 = 1\nterm y1^3 = 1\n");
    auto rep = audit(pencil);
    CHECK(rep.all_pass);
    bool attained = false;
    for (auto &r : rep.rows)
        if (r.object == "K" && r.l == 4) {
            CHECK(r.bound == 2);
            attained = r.observed == 2;
        }
    CHECK(attained);
    // the quartic part itself: K_4 = -3 t^2 (xi eta)^2
    auto a = audit_run(pencil);
    CHECK(a.art.K.coeff({2, 2}) ==
          TPoly(Radical(-3)) * TPoly::t() * TPoly::t());
}

TEST_CASE("audit: two degrees of freedom, dense direction") {
    auto pencil = pencil_of("n = 2\norder = 6\nradicals = 2\n"
                            "lambda 1 = 1\nlambda 2 = sqrt(2)\n"
                            "term x1^3 = 1\n",
                            "n = 2\norder = 6\nradicals = 2\n"
                            "lambda 1 = 1\nlambda 2 = sqrt(2)\n"
                            "term x1^3 = 1/2\nterm x1 x2 y2 = 1\nterm y1 y2^2 = -1\n"
                            "term x2^2 y1 = 1/3\n");
    auto rep = audit(pencil);
    CHECK(rep.all_pass);
    // csv shape
    auto text = rep.csv();
    CHECK(text.rfind("object,l,k,observed_deg,bound,verdict\n", 0) == 0);
    CHECK(text.find(",FAIL") == std::string::npos);
}

TEST_CASE("resonant pencil frequencies are rejected") {
    auto pencil = pencil_of("n = 2\norder = 4\nlambda 1 = 1\nlambda 2 = 1\n",
                            "n = 2\norder = 4\nlambda 1 = 1\nlambda 2 = 1\nterm x1^3 = 1\n");
    CHECK_THROWS_AS(audit_run(pencil), SpecError);
}

TEST_CASE("interpolation spot check: match, and guard rails") {
    auto pencil = pencil_of("n = 1\norder = 6\nlambda 1 = 1\n",
                            "n = 1\norder = 6\nlambda 1 = 1\nterm x1^3 = 1\nterm y1^3 = 1\n");
    std::vector<Rational> nodes = {Rational(0), Rational(1), Rational(-1), Rational(1, 2),
                                   Rational(2), Rational(-3, 2)};
    CHECK(spot_check_interpolation(pencil, 4, nodes).match);
    CHECK(spot_check_interpolation(pencil, 6, nodes).match);

    CHECK_THROWS_AS(spot_check_interpolation(pencil, 6, {Rational(0), Rational(1)}), SpecError);
    std::vector<Rational> dup = {Rational(0), Rational(1), Rational(1), Rational(2)};
    CHECK_THROWS_AS(spot_check_interpolation(pencil, 4, dup), SpecError);
}

TEST_CASE("evaluation at fixed t is a homomorphism onto the exact run") {
    auto pencil = pencil_of("n = 2\norder = 6\nradicals = 2\n"
                            "lambda 1 = 1\nlambda 2 = sqrt(2)\n"
                            "term x1^3 = 1\n",
                            "n = 2\norder = 6\nradicals = 2\n"
                            "lambda 1 = 1\nlambda 2 = sqrt(2)\n"
                            "term x1^3 = 1/2\nterm x2^2 y1 = 1/3\n");
    auto part = normalize_pencil(pencil);
    for (Rational t0 : {Rational(0), Rational(2, 3), Rational(-5)}) {
        auto fixed = normalize<Radical>(pencil_member(pencil, Radical(t0)));
        CHECK(evaluate_at(part.K, Radical(t0)) == fixed.K);
        CHECK(evaluate_at(part.v, Radical(t0)) == fixed.v);
        for (int k = 0; k < 2; ++k) {
            CHECK(evaluate_at(part.phi[k], Radical(t0)) == fixed.phi[k]);
            CHECK(evaluate_at(part.psi[k], Radical(t0)) == fixed.psi[k]);
        }
    }
}
