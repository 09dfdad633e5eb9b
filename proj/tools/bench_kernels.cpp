// Benchmark: OpenMP multiply kernel vs the serial reference, plus one
// end-to-end normalization timing. Verifies bit-identical outputs while
// timing, so a scheduling regression shows up here before it shows up as
// a wrong answer.

#include "bnf/engine.hpp"

#include <chrono>
#include <iostream>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace bnf;

namespace {

GradedSeries<Radical> dense_series(std::mt19937 &rng, int n, int maxdeg) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
    GradedSeries<Radical> s(n, maxdeg);
    std::function<void(Exponent &, int, int)> fill = [&](Exponent &e, int var, int budget) {
        if (var == 2 * n - 1) {
            e[var] = budget;
            if (exp_degree(e) >= 1)
                s.add_term(e, Radical(Rational(num(rng), den(rng))));
            return;
        }
        for (int d = 0; d <= budget; ++d) {
            e[var] = d;
            fill(e, var + 1, budget - d);
        }
        e[var] = 0;
    };
    for (int total = 1; total <= maxdeg; ++total) {
        Exponent e(2 * n, 0);
        fill(e, 0, total);
    }
    return s;
}

template <class F> double time_of(F &&f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main() {
#ifdef _OPENMP
    std::cout << "openmp threads: " << omp_get_max_threads() << "\n";
#else
    std::cout << "openmp: disabled\n";
#endif

    std::mt19937 rng(1);
    for (auto [n, deg] : {std::pair{1, 14}, {2, 8}}) {
        auto a = dense_series(rng, n, deg);
        auto b = dense_series(rng, n, deg);
        GradedSeries<Radical> p, q;
        double ts = time_of([&] { q = multiply_truncated_serial(a, b, deg); });
        double tp = time_of([&] { p = multiply_truncated(a, b, deg); });
        bool same = p == q;
        std::cout << "multiply n=" << n << " deg=" << deg << " terms=" << a.term_count()
                  << "  serial " << ts << "s  parallel " << tp << "s  speedup "
                  << (tp > 0 ? ts / tp : 0) << "  identical " << (same ? "yes" : "NO") << "\n";
        if (!same)
            return 1;
    }

    std::istringstream is("n = 1\norder = 16\nlambda 1 = 1\n"
                          "term x1^3 = 1\nterm y1^3 = 1\n");
    auto spec = parse_spec(is);
    NormalFormArtifacts<Radical> art;
    double tn = time_of([&] { art = normalize<Radical>(spec); });
    std::cout << "normalize 1-dof order 16: " << tn << "s, |v| = " << art.v.term_count()
              << " terms\n";
    return 0;
}
