#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bnf/dump.hpp"
#include "bnf/series.hpp"

#include <random>
#include <sstream>

using namespace bnf;
using RSeries = GradedSeries<Radical>;

namespace {

RSeries mono(int n, int N, const Exponent &e, const Radical &c) {
    RSeries s(n, N);
    s.add_term(e, c);
    return s;
}

// independent brute-force composition oracle: expand monomial by monomial
// with naive repeated serial multiplication, no Horner, no caching
RSeries compose_oracle(const RSeries &f, const std::vector<RSeries> &subs, int N) {
    RSeries out(f.dof(), N);
    for (auto &[l, p] : f.parts())
        for (auto &[e, c] : p) {
            RSeries term(f.dof(), N);
            term.add_term(Exponent(2 * f.dof(), 0), Radical(1));
            for (size_t v = 0; v < e.size(); ++v)
                for (int j = 0; j < e[v]; ++j)
                    term = multiply_truncated_serial(term, subs[v], N);
            out += term.scaled(c);
        }
    return out;
}

// direct partial-derivative bracket oracle (same formula, independent path
// through the serial multiplier and explicit loops)
RSeries bracket_oracle(const RSeries &f, const RSeries &g, int N) {
    int n = f.dof();
    RSeries out(n, N);
    for (int k = 0; k < n; ++k) {
        out += multiply_truncated_serial(f.derivative(k), g.derivative(n + k), N);
        out -= multiply_truncated_serial(f.derivative(n + k), g.derivative(k), N);
    }
    return out;
}

RSeries random_series(std::mt19937 &rng, int n, int maxdeg, int terms, int mindeg = 1) {
    std::uniform_int_distribution<int> deg(mindeg, maxdeg), num(-5, 5), den(1, 4);
    RSeries s(n, maxdeg);
    for (int i = 0; i < terms; ++i) {
        int d = deg(rng);
        Exponent e(2 * n, 0);
        for (int j = 0; j < d; ++j)
            e[std::uniform_int_distribution<int>(0, 2 * n - 1)(rng)] += 1;
        s.add_term(e, Radical(Rational(num(rng), den(rng))));
    }
    return s;
}

} // namespace

TEST_CASE("add: inverse, merge, truncation contract") {
    int n = 1;
    RSeries a = mono(n, 6, {1, 1}, Radical(1));   // x1 y1
    RSeries b = mono(n, 6, {1, 1}, Radical(-1));
    CHECK((a + b).empty());

    RSeries c = mono(n, 6, {3, 0}, Radical(1)) + mono(n, 6, {1, 2}, Radical(1));
    CHECK(c.part(3)->size() == 2);

    RSeries d6 = mono(n, 6, {3, 0}, Radical(1));
    RSeries d8 = mono(n, 8, {0, 7}, Radical(1));
    RSeries sum = d6 + d8;
    CHECK(sum.trunc() == 6);
    CHECK(sum.part(7) == nullptr);
}

TEST_CASE("multiply: basic products and truncation") {
    int n = 1;
    RSeries xy = mono(n, 4, {1, 1}, Radical(1));
    auto sq = multiply_truncated(xy, xy, 4);
    CHECK(sq.coeff({2, 2}) == Radical(1));
    CHECK(sq.term_count() == 1);

    RSeries x3 = mono(n, 6, {3, 0}, Radical(1));
    RSeries y3 = mono(n, 6, {0, 3}, Radical(1));
    CHECK(multiply_truncated(x3, y3, 4).empty());

    RSeries p = mono(n, 3, {1, 0}, Radical(1)) + mono(n, 3, {2, 0}, Radical(1));
    auto pp = multiply_truncated(p, p, 3);
    CHECK(pp.coeff({2, 0}) == Radical(1));
    CHECK(pp.coeff({3, 0}) == Radical(2));
    CHECK(pp.part(4) == nullptr);

    RSeries two_dof(2, 3);
    CHECK_THROWS_AS(multiply_truncated(p, two_dof, 3), SeriesError);
}

TEST_CASE("compose: identity, binomial, and the expansion oracle") {
    int n = 1;
    RSeries f = mono(n, 4, {1, 1}, Radical(1));
    auto id = identity_subs<Radical>(n, 4);
    CHECK(compose_truncated(f, id, 4) == f);

    // f = x^2 at x -> x + x^2, N=3
    RSeries g = mono(n, 3, {2, 0}, Radical(1));
    std::vector<RSeries> subs = {mono(n, 3, {1, 0}, Radical(1)) + mono(n, 3, {2, 0}, Radical(1)),
                                 mono(n, 3, {0, 1}, Radical(1))};
    auto r = compose_truncated(g, subs, 3);
    CHECK(r.coeff({2, 0}) == Radical(1));
    CHECK(r.coeff({3, 0}) == Radical(2));

    // f = x1 y1 at x -> x - x^2 y, y -> y: against the brute-force oracle
    std::vector<RSeries> subs2 = {mono(n, 4, {1, 0}, Radical(1)) + mono(n, 4, {2, 1}, Radical(-1)),
                                  mono(n, 4, {0, 1}, Radical(1))};
    CHECK(compose_truncated(f, subs2, 4) == compose_oracle(f, subs2, 4));
    CHECK(compose_truncated(f, subs2, 4).coeff({1, 1}) == Radical(1));
    CHECK(compose_truncated(f, subs2, 4).coeff({2, 2}) == Radical(-1));
}

TEST_CASE("compose rejects constant parts in the substitution") {
    int n = 1;
    RSeries f = mono(n, 4, {1, 1}, Radical(1));
    RSeries bad = mono(n, 4, {0, 0}, Radical(1));
    std::vector<RSeries> subs = {bad, mono(n, 4, {0, 1}, Radical(1))};
    CHECK_THROWS_AS(compose_truncated(f, subs, 4), SeriesError);
}

TEST_CASE("compose agrees with the oracle on random inputs") {
    std::mt19937 rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        int n = 1 + rep % 2;
        RSeries f = random_series(rng, n, 5, 6);
        std::vector<RSeries> subs;
        for (int v = 0; v < 2 * n; ++v) {
            RSeries s = GradedSeries<Radical>::variable(n, 5, v);
            s += random_series(rng, n, 5, 2, 2);
            subs.push_back(s);
        }
        CHECK(compose_truncated(f, subs, 5) == compose_oracle(f, subs, 5));
    }
}

TEST_CASE("poisson bracket: canonical pair, antisymmetry, oracle") {
    int n = 1;
    RSeries x = mono(n, 4, {1, 0}, Radical(1));
    RSeries y = mono(n, 4, {0, 1}, Radical(1));
    auto b = poisson_bracket(x, y, 4);
    CHECK(b.coeff({0, 0}) == Radical(1)); // {x,y} = 1, degree 0 retained

    RSeries f = mono(n, 4, {1, 1}, Radical(1)) + mono(n, 4, {3, 0}, Radical(2));
    CHECK(poisson_bracket(f, f, 4).empty());

    RSeries xy = mono(n, 4, {1, 1}, Radical(1));
    RSeries x2y = mono(n, 4, {2, 1}, Radical(1));
    auto br = poisson_bracket(xy, x2y, 4);
    CHECK(br == bracket_oracle(xy, x2y, 4));
    CHECK(br.coeff({2, 1}) == Radical(-1)); // {xy, x^2 y} = -x^2 y
}

TEST_CASE("ring laws on random sparse inputs") {
    std::mt19937 rng(99);
    for (int rep = 0; rep < 200; ++rep) {
        int n = 1 + rep % 3;
        int N = 6;
        RSeries a = random_series(rng, n, N, 4);
        RSeries b = random_series(rng, n, N, 4);
        RSeries c = random_series(rng, n, N, 4);
        CHECK(multiply_truncated(a, b, N) == multiply_truncated(b, a, N));
        CHECK(multiply_truncated(multiply_truncated(a, b, N), c, N) ==
              multiply_truncated(a, multiply_truncated(b, c, N), N));
        CHECK(multiply_truncated(a, b + c, N) ==
              multiply_truncated(a, b, N) + multiply_truncated(a, c, N));
    }
}

TEST_CASE("Jacobi identity and Leibniz rule") {
    std::mt19937 rng(5);
    for (int rep = 0; rep < 60; ++rep) {
        int n = 1 + rep % 2;
        int N = 5;
        RSeries f = random_series(rng, n, N, 3);
        RSeries g = random_series(rng, n, N, 3);
        RSeries h = random_series(rng, n, N, 3);
        auto J = poisson_bracket(f, poisson_bracket(g, h, N), N) +
                 poisson_bracket(g, poisson_bracket(h, f, N), N) +
                 poisson_bracket(h, poisson_bracket(f, g, N), N);
        // truncation garbage lives above degree f+g+h could reach; the
        // identity holds degreewise where all three brackets are complete
        int safe = N - 2;
        for (auto &[l, p] : J.parts())
            if (l <= safe)
                CHECK(p.empty());
        auto lhs = poisson_bracket(f, multiply_truncated(g, h, N), N);
        auto rhs = multiply_truncated(poisson_bracket(f, g, N), h, N) +
                   multiply_truncated(g, poisson_bracket(f, h, N), N);
        for (int l = 0; l <= safe; ++l) {
            auto d = lhs - rhs;
            CHECK(d.part(l) == nullptr);
        }
    }
}

TEST_CASE("compose associativity with truncated composite substitution") {
    std::mt19937 rng(21);
    for (int rep = 0; rep < 20; ++rep) {
        int n = 1 + rep % 2;
        int N = 5;
        RSeries f = random_series(rng, n, N, 4);
        std::vector<RSeries> s1, s2;
        for (int v = 0; v < 2 * n; ++v) {
            RSeries a = GradedSeries<Radical>::variable(n, N, v);
            a += random_series(rng, n, N, 2, 2);
            s1.push_back(a);
            RSeries b = GradedSeries<Radical>::variable(n, N, v);
            b += random_series(rng, n, N, 2, 2);
            s2.push_back(b);
        }
        std::vector<RSeries> composite;
        for (int v = 0; v < 2 * n; ++v)
            composite.push_back(compose_truncated(s1[v], s2, N));
        CHECK(compose_truncated(compose_truncated(f, s1, N), s2, N) ==
              compose_truncated(f, composite, N));
    }
}

TEST_CASE("canonical form validator walk") {
    std::mt19937 rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        int n = 1 + rep % 3;
        RSeries a = random_series(rng, n, 6, 5);
        RSeries b = random_series(rng, n, 6, 5);
        CHECK(a.validate());
        CHECK((a + b).validate());
        CHECK((a - b).validate());
        CHECK(multiply_truncated(a, b, 6).validate());
        CHECK(poisson_bracket(a, b, 6).validate());
    }
}

TEST_CASE("param_degree") {
    GradedSeries<TPoly> s(1, 4);
    TPoly t = TPoly::t();
    s.add_term({2, 0}, TPoly(3) * t * t + t); // 3t^2 + t
    s.add_term({1, 1}, TPoly(5));
    auto m = param_degree(s);
    CHECK(m.at({2, 0}) == 2);
    CHECK(m.at({1, 1}) == 0);
    CHECK(m.size() == 2); // absent terms are not present in the map
}

TEST_CASE("dump round trip is bit-exact") {
    std::mt19937 rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        int n = 1 + rep % 2;
        RSeries s = random_series(rng, n, 6, 8);
        // sprinkle radical coefficients
        s.add_term(Exponent(2 * n, 0), Radical(0)); // no-op
        s.add_term([&] {
            Exponent e(2 * n, 0);
            e[0] = 3;
            return e;
        }(), Radical(1, 3) + Radical::sqrt_of(2, Rational(-2, 5)));
        CHECK(series_from_str<Radical>(series_str(s)) == s);
    }
    // parameter domain
    GradedSeries<TPoly> p(1, 4);
    p.add_term({2, 0}, TPoly(Radical(1, 2)) * TPoly::t() + TPoly(Radical::sqrt_of(2)));
    CHECK(series_from_str<TPoly>(series_str(p)) == p);
}

TEST_CASE("dump lines are sorted in graded lex order") {
    RSeries s(2, 4);
    s.add_term({0, 1, 3, 0}, Radical(1));
    s.add_term({3, 0, 0, 1}, Radical(1));
    s.add_term({1, 0, 1, 0}, Radical(1));
    std::string text = series_str(s);
    auto p1 = text.find("1 0 1 0");
    auto p2 = text.find("0 1 3 0");
    auto p3 = text.find("3 0 0 1");
    CHECK(p1 != std::string::npos);
    CHECK(p1 < p2);
    CHECK(p2 < p3);
}
