#pragma once

// Order-by-order Birkhoff normalization driven by a generating function
// v(x, eta). At order l:
//   1. extend the transformation (phi, psi) to degree l-1 with one
//      fixed-point round (lower degrees are already settled),
//   2. take the degree-l part of H(phi, psi); resonant monomials stay in
//      K_l, each non-resonant monomial P is cancelled by the v_l
//      coefficient -{.}_P / divisor,
//   3. fold the new v_l linearly into the degree-(l-1) parts of phi, psi
//      (that is exactly how v_l enters them),
//   4. in Phi-normalization mode, fix the resonant coefficients of v_l so
//      that sum(xi_k y_k - eta_k x_k) has no resonant monomials; the
//      linear system is assembled explicitly and solved, and a singular
//      system is a hard error.

#include "bnf/hamiltonian.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace bnf {

struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivisorRecord {
    double magnitude = std::numeric_limits<double>::infinity();
    Exponent exponent;   // empty if no division happened
    std::string value;   // exact string (exact domains) or numeric
};

struct OrderLog {
    int degree = 0;
    size_t k_terms = 0;
    size_t v_terms = 0;
    double min_divisor = std::numeric_limits<double>::infinity();
    bool modes_coincide = false; // odd degrees: no resonant monomials
    double seconds = 0;
};

template <class S> struct NormalFormArtifacts {
    int n = 0;
    int order = 0;
    NormalizationMode mode = NormalizationMode::Phi;
    GradedSeries<S> K;                // in (xi, eta), resonant only
    GradedSeries<S> v;                // in (x, eta), v_2 = sum x_k eta_k
    std::vector<GradedSeries<S>> phi; // x = phi(xi, eta)
    std::vector<GradedSeries<S>> psi; // y = psi(xi, eta)
    std::vector<S> lambda;
    DivisorRecord min_divisor;
    std::vector<OrderLog> log;
};

struct EngineOptions {
    // numeric runs only: divisors below this magnitude count as zero
    double zero_tolerance = std::pow(2.0, -128);
};

namespace detail {

template <class S> bool divisor_is_zero(const S &d, const EngineOptions &) {
    return ScalarTraits<S>::is_zero(d);
}
inline bool divisor_is_zero(const CFloat &d, const EngineOptions &opt) {
    return abs_approx(d) < opt.zero_tolerance;
}

// v_2 = sum x_k eta_k
template <class S> GradedSeries<S> identity_generator(int n, int N) {
    GradedSeries<S> v(n, N);
    for (int k = 0; k < n; ++k) {
        Exponent e(2 * n, 0);
        e[k] = 1;
        e[n + k] = 1;
        v.add_term(e, S(1));
    }
    return v;
}

// Gaussian elimination over the scalar field; throws on a singular matrix.
template <class S>
std::vector<S> solve_linear(std::vector<std::vector<S>> M, std::vector<S> b) {
    size_t m = b.size();
    for (size_t col = 0; col < m; ++col) {
        size_t piv = m;
        for (size_t r = col; r < m; ++r)
            if (!ScalarTraits<S>::is_zero(M[r][col])) {
                piv = r;
                break;
            }
        if (piv == m)
            throw EngineError("Phi-normalization linear system is singular");
        std::swap(M[col], M[piv]);
        std::swap(b[col], b[piv]);
        for (size_t r = 0; r < m; ++r) {
            if (r == col || ScalarTraits<S>::is_zero(M[r][col]))
                continue;
            S f = M[r][col] / M[col][col];
            for (size_t c = col; c < m; ++c)
                M[r][c] -= f * M[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<S> x(m);
    for (size_t r = 0; r < m; ++r)
        x[r] = b[r] / M[r][r];
    return x;
}

} // namespace detail

// Solve x = xi - sum v_{l,eta}(phi, eta), y = eta + sum v_{l,x}(phi, eta)
// for identity-tangent (phi, psi) through degree `order`. Fixed-point
// iteration; each round settles one further homogeneous degree.
template <class S>
std::pair<std::vector<GradedSeries<S>>, std::vector<GradedSeries<S>>>
invert_generating(const GradedSeries<S> &v, int order) {
    int n = v.dof();
    auto v2 = detail::identity_generator<S>(n, v.trunc());
    {
        auto *p2 = v.part(2);
        if (!p2 || GradedSeries<S>(v).truncated(2) != v2.truncated(2))
            throw EngineError("generating function must start with sum x_k eta_k");
    }
    GradedSeries<S> w = v - v2; // degrees >= 3
    std::vector<GradedSeries<S>> w_eta(n), w_x(n);
    for (int k = 0; k < n; ++k) {
        w_eta[k] = w.derivative(n + k).truncated(order);
        w_x[k] = w.derivative(k).truncated(order);
    }

    std::vector<GradedSeries<S>> phi(n), psi(n), subs(2 * n);
    for (int k = 0; k < n; ++k)
        phi[k] = GradedSeries<S>::variable(n, order, k);
    for (int k = 0; k < n; ++k)
        subs[n + k] = GradedSeries<S>::variable(n, order, n + k);

    // round r settles degree r+1; truncating at r+1 keeps early rounds cheap
    for (int r = 1; r <= order - 1; ++r) {
        int cut = std::min(order, r + 1);
        for (int k = 0; k < n; ++k)
            subs[k] = phi[k].truncated(cut);
        for (int k = 0; k < n; ++k) {
            auto corr = compose_truncated(w_eta[k].truncated(cut), subs, cut);
            phi[k] = GradedSeries<S>::variable(n, order, k) - corr.truncated(order);
        }
    }
    for (int k = 0; k < n; ++k)
        subs[k] = phi[k];
    for (int k = 0; k < n; ++k)
        psi[k] = GradedSeries<S>::variable(n, order, n + k) +
                 compose_truncated(w_x[k], subs, order);
    return {phi, psi};
}

namespace detail {

// one fixed-point round at truncation `cut`, updating phi then psi
template <class S>
void transform_round(std::vector<GradedSeries<S>> &phi, std::vector<GradedSeries<S>> &psi,
                     const GradedSeries<S> &v, int cut) {
    int n = v.dof();
    auto v2 = identity_generator<S>(n, v.trunc());
    GradedSeries<S> w = v - v2;
    std::vector<GradedSeries<S>> subs(2 * n);
    for (int k = 0; k < n; ++k) {
        subs[k] = phi[k].truncated(cut);
        subs[n + k] = GradedSeries<S>::variable(n, cut, n + k);
    }
    std::vector<GradedSeries<S>> phi_new(n);
    for (int k = 0; k < n; ++k)
        phi_new[k] = GradedSeries<S>::variable(n, cut, k) -
                     compose_truncated(w.derivative(n + k).truncated(cut), subs, cut);
    for (int k = 0; k < n; ++k)
        subs[k] = phi_new[k];
    for (int k = 0; k < n; ++k)
        psi[k] = GradedSeries<S>::variable(n, cut, n + k) +
                 compose_truncated(w.derivative(k).truncated(cut), subs, cut);
    phi = std::move(phi_new);
}

// v gained `delta` at degree l; phi, psi pick up the direct linear term at
// degree l-1: phi_k -= delta_eta_k, psi_k += delta_x_k (in (xi,eta)).
template <class S>
void fold_generator_delta(std::vector<GradedSeries<S>> &phi, std::vector<GradedSeries<S>> &psi,
                          const GradedSeries<S> &delta) {
    int n = delta.dof();
    for (int k = 0; k < n; ++k) {
        phi[k] -= delta.derivative(n + k);
        psi[k] += delta.derivative(k);
    }
}

// Phi = sum (xi_k psi_k - eta_k phi_k), truncated
template <class S>
GradedSeries<S> phi_form(const std::vector<GradedSeries<S>> &phi,
                         const std::vector<GradedSeries<S>> &psi, int N) {
    int n = static_cast<int>(phi.size());
    GradedSeries<S> out(n, N);
    for (int k = 0; k < n; ++k) {
        out += multiply_truncated(GradedSeries<S>::variable(n, N, k), psi[k], N);
        out -= multiply_truncated(GradedSeries<S>::variable(n, N, n + k), phi[k], N);
    }
    return out;
}

} // namespace detail

// Normalize with an explicitly provided full Hamiltonian H (in the working
// domain); the spec contributes n, order, lambda, and the mode. The pencil
// auditor uses this to hand in H_t over the parameter ring.
template <class S>
NormalFormArtifacts<S> normalize_with(const HamiltonianSpec &spec, const GradedSeries<S> &H,
                                      const EngineOptions &opt = {}) {
    using Clock = std::chrono::steady_clock;
    int n = spec.n, N = spec.order;
    NormalFormArtifacts<S> art;
    art.n = n;
    art.order = N;
    art.mode = spec.mode;
    art.lambda.reserve(n);
    for (auto &l : spec.lambda.lambda)
        art.lambda.push_back(ScalarTraits<S>::lift(l));

    art.v = detail::identity_generator<S>(n, N);
    art.K = GradedSeries<S>(n, N);
    {
        // K_2 = sum lambda_k xi_k eta_k
        for (int k = 0; k < n; ++k) {
            Exponent e(2 * n, 0);
            e[k] = 1;
            e[n + k] = 1;
            art.K.add_term(e, art.lambda[k]);
        }
    }

    // phi, psi maintained through degree l-1 inside the loop
    art.phi.resize(n);
    art.psi.resize(n);
    for (int k = 0; k < n; ++k) {
        art.phi[k] = GradedSeries<S>::variable(n, N - 1 > 0 ? N - 1 : 1, k);
        art.psi[k] = GradedSeries<S>::variable(n, N - 1 > 0 ? N - 1 : 1, n + k);
    }

    std::vector<GradedSeries<S>> subs(2 * n, GradedSeries<S>(n, 0));

    for (int l = 3; l <= N; ++l) {
        auto t0 = Clock::now();
        OrderLog olog;
        olog.degree = l;

        // settle degree l-1 of (phi, psi) given v through degree l-1
        detail::transform_round(art.phi, art.psi, art.v, l - 1);

        for (int k = 0; k < n; ++k) {
            subs[k] = art.phi[k].truncated(l);
            subs[n + k] = art.psi[k].truncated(l);
        }
        GradedSeries<S> B = compose_truncated(H.truncated(l), subs, l);

        GradedSeries<S> v_l(n, N);
        typename GradedSeries<S>::TermMap k_part;
        if (auto *bl = B.part(l)) {
            for (auto &[e, c] : *bl) {
                if (exp_resonant(e)) {
                    k_part.emplace(e, c);
                    continue;
                }
                S div(0);
                for (int k = 0; k < n; ++k)
                    div += art.lambda[k] * S(e[k] - e[n + k]);
                if (detail::divisor_is_zero(div, opt))
                    throw EngineError("vanishing divisor on a non-resonant monomial at degree " +
                                      std::to_string(l));
                double mag = abs_approx(div);
                if (mag < art.min_divisor.magnitude) {
                    art.min_divisor.magnitude = mag;
                    art.min_divisor.exponent = e;
                    art.min_divisor.value = ScalarTraits<S>::str(div);
                }
                olog.min_divisor = std::min(olog.min_divisor, mag);
                v_l.add_term(e, -c / div);
            }
        }
        art.K.set_part(l, std::move(k_part));

        detail::fold_generator_delta(art.phi, art.psi, v_l);
        for (auto &[d, p] : v_l.parts())
            for (auto &[e, c] : p)
                art.v.add_term(e, c);

        // resonant coefficients of v_l
        bool has_resonant = l % 2 == 0;
        olog.modes_coincide = !has_resonant;
        if (has_resonant && spec.mode == NormalizationMode::Phi) {
            // resonant monomials of degree l
            std::vector<Exponent> res;
            std::vector<int> half(n, 0);
            std::function<void(int, int)> gen = [&](int k, int budget) {
                if (k == n) {
                    if (budget == 0) {
                        Exponent e(2 * n, 0);
                        for (int j = 0; j < n; ++j)
                            e[j] = e[n + j] = half[j];
                        res.push_back(e);
                    }
                    return;
                }
                for (int vdeg = 0; vdeg <= budget; ++vdeg) {
                    half[k] = vdeg;
                    gen(k + 1, budget - vdeg);
                }
            };
            gen(0, l / 2);

            size_t m = res.size();
            // base residual: resonant degree-l part of Phi with the current v
            auto base = detail::phi_form(art.phi, art.psi, l).resonant_part();
            std::vector<S> b(m, S(0));
            if (auto *bp = base.part(l)) {
                for (size_t i = 0; i < m; ++i) {
                    auto it = bp->find(res[i]);
                    if (it != bp->end())
                        b[i] = it->second;
                }
            }
            // columns: adding monomial R_j to v_l shifts Phi_l by
            // sum_k (xi_k dR_j/dx_k + eta_k dR_j/deta_k)
            std::vector<std::vector<S>> M(m, std::vector<S>(m, S(0)));
            for (size_t j = 0; j < m; ++j) {
                GradedSeries<S> R(n, N);
                R.add_term(res[j], S(1));
                GradedSeries<S> col(n, l);
                for (int k = 0; k < n; ++k) {
                    col += multiply_truncated(GradedSeries<S>::variable(n, l, k),
                                              R.derivative(k), l);
                    col += multiply_truncated(GradedSeries<S>::variable(n, l, n + k),
                                              R.derivative(n + k), l);
                }
                if (auto *cp = col.part(l))
                    for (size_t i = 0; i < m; ++i) {
                        auto it = cp->find(res[i]);
                        if (it != cp->end())
                            M[j][i] = it->second; // columns are diagonal here,
                        // but keep the general assembly
                    }
            }
            // transpose into row-major system M^T gamma = -b; solving also
            // certifies invertibility, which the construction asserts
            std::vector<std::vector<S>> A(m, std::vector<S>(m, S(0)));
            for (size_t i = 0; i < m; ++i)
                for (size_t j = 0; j < m; ++j)
                    A[i][j] = M[j][i];
            std::vector<S> rhs(m);
            for (size_t i = 0; i < m; ++i)
                rhs[i] = -b[i];
            auto gamma = detail::solve_linear(A, rhs);
            GradedSeries<S> v_res(n, N);
            for (size_t j = 0; j < m; ++j)
                v_res.add_term(res[j], gamma[j]);
            detail::fold_generator_delta(art.phi, art.psi, v_res);
            for (auto &[d, p] : v_res.parts())
                for (auto &[e, c] : p)
                    art.v.add_term(e, c);
        }

        if (auto *vp = art.v.part(l))
            olog.v_terms = vp->size();
        if (auto *kp = art.K.part(l))
            olog.k_terms = kp->size();
        olog.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        art.log.push_back(olog);
    }
    return art;
}

template <class S>
NormalFormArtifacts<S> normalize(const HamiltonianSpec &spec, const EngineOptions &opt = {}) {
    return normalize_with<S>(spec, build_hamiltonian<S>(spec, spec.order), opt);
}

// Phi = sum (xi_k y_k - eta_k x_k) expressed in (xi, eta), resonant
// monomials only. Identically zero through order N in Phi mode.
template <class S> GradedSeries<S> phi_residual(const NormalFormArtifacts<S> &art) {
    return detail::phi_form(art.phi, art.psi, art.order).resonant_part();
}

} // namespace bnf
