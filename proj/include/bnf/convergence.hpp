#pragma once

// Coefficient-growth diagnostics and the Bernstein-lemma machinery:
// per-degree maxima of |K|, a log-linear radius fit, closed-form Green
// functions for disks and intervals, the Bernstein inequality checker,
// and scans of K-growth over parameter families.

#include "bnf/audit.hpp"

#include <complex>
#include <functional>

namespace bnf {

struct GrowthReport {
    std::map<int, double> r_l;        // max |K_i| per degree, l >= 3
    double radius_estimate = 0;       // +inf encoded as infinity()
    int fit_lo = 0, fit_hi = 0;       // degrees used by the tail fit
    double fit_slope = 0;
    double fit_residual = 0;          // rms residual of the log fit
    double min_divisor = 0;
    std::vector<double> rho0_probe;   // max |K_i| rho0^l per degree

    bool radius_infinite() const { return std::isinf(radius_estimate); }

    std::string csv() const {
        std::ostringstream os;
        os << "l,r_l,log_r_l\n";
        for (auto &[l, r] : r_l)
            os << l << ',' << r << ',' << (r > 0 ? std::log(r) : -std::numeric_limits<double>::infinity()) << "\n";
        return os.str();
    }
};

template <class S>
GrowthReport growth(const NormalFormArtifacts<S> &art, double rho0) {
    if (art.order < 6)
        throw EngineError("growth: truncation order below 6, tail fit meaningless");
    GrowthReport rep;
    rep.min_divisor = art.min_divisor.magnitude;
    for (int l = 3; l <= art.order; ++l) {
        double r = 0;
        if (auto *p = art.K.part(l))
            for (auto &[e, c] : *p)
                r = std::max(r, abs_approx(c));
        rep.r_l[l] = r;
        rep.rho0_probe.push_back(r * std::pow(rho0, l));
    }
    // least squares of log r_l against l over the top half of degrees
    rep.fit_lo = art.order / 2 + 1;
    rep.fit_hi = art.order;
    std::vector<std::pair<double, double>> pts;
    for (int l = rep.fit_lo; l <= rep.fit_hi; ++l)
        if (rep.r_l[l] > 0)
            pts.emplace_back(l, std::log(rep.r_l[l]));
    if (pts.size() < 2) {
        // finitely many nonzero coefficients: formally entire normal form
        rep.radius_estimate = std::numeric_limits<double>::infinity();
        return rep;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto &[x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double npts = static_cast<double>(pts.size());
    double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    double intercept = (sy - slope * sx) / npts;
    double rss = 0;
    for (auto &[x, y] : pts) {
        double d = y - (slope * x + intercept);
        rss += d * d;
    }
    rep.fit_slope = slope;
    rep.fit_residual = std::sqrt(rss / npts);
    rep.radius_estimate = slope <= 0 ? std::numeric_limits<double>::infinity()
                                     : std::exp(-slope);
    return rep;
}

// --- Green functions (closed forms) ------------------------------------

struct GreenDomain {
    enum class Shape { Disk, Interval } shape;
    // disk: center, radius; interval: [a, b] on the real axis
    std::complex<double> center{0, 0};
    double radius = 1;
    double a = -1, b = 1;

    static GreenDomain disk(std::complex<double> c, double r) {
        GreenDomain d;
        d.shape = Shape::Disk;
        d.center = c;
        d.radius = r;
        return d;
    }
    static GreenDomain interval(double a, double b) {
        if (!(a < b))
            throw std::invalid_argument("interval requires a < b");
        GreenDomain d;
        d.shape = Shape::Interval;
        d.a = a;
        d.b = b;
        return d;
    }

    // capacity: disk of radius r -> r; interval [a,b] -> (b-a)/4
    double capacity() const {
        return shape == Shape::Disk ? radius : (b - a) / 4;
    }
};

struct GreenError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// g_Omega(t, infinity) for the complement of the compact set; 0 on the
// boundary, log|t| + O(1) at infinity.
inline double green(const GreenDomain &dom, std::complex<double> t) {
    if (dom.shape == GreenDomain::Shape::Disk) {
        double d = std::abs(t - dom.center);
        if (d < dom.radius)
            throw GreenError("point inside the disk");
        return std::log(d / dom.radius);
    }
    // affine pullback of [a,b] onto [-1,1]; g = log|w + sqrt(w^2-1)| with
    // the branch that keeps g >= 0
    std::complex<double> w = (2.0 * t - (dom.a + dom.b)) / (dom.b - dom.a);
    if (w.imag() == 0 && std::abs(w.real()) < 1)
        throw GreenError("point inside the interval");
    std::complex<double> s = std::sqrt(w * w - 1.0);
    double m1 = std::abs(w + s), m2 = std::abs(w - s);
    return std::log(std::max(m1, m2));
}

// --- Bernstein inequality -----------------------------------------------

struct BernsteinResult {
    bool pass = true;
    double max_ratio = 0; // max |P(t)| / (e^{n g} ||P||)
    double sup_norm = 0;
};

inline std::complex<double> eval_poly(const std::vector<std::complex<double>> &coeffs,
                                      std::complex<double> t) {
    std::complex<double> r{0, 0};
    for (size_t i = coeffs.size(); i-- > 0;)
        r = r * t + coeffs[i];
    return r;
}

// sup norm on the compact set by dense boundary sampling with refinement
inline double sup_norm_on(const GreenDomain &dom,
                          const std::vector<std::complex<double>> &coeffs, double tol = 1e-9) {
    size_t m = 64;
    double prev = -1;
    for (int round = 0; round < 12; ++round) {
        double cur = 0;
        if (dom.shape == GreenDomain::Shape::Disk) {
            for (size_t i = 0; i < m; ++i) {
                double th = 2 * M_PI * static_cast<double>(i) / static_cast<double>(m);
                auto t = dom.center + dom.radius * std::complex<double>(std::cos(th), std::sin(th));
                cur = std::max(cur, std::abs(eval_poly(coeffs, t)));
            }
        } else {
            for (size_t i = 0; i < m; ++i) {
                double th = M_PI * (static_cast<double>(i) + 0.5) / static_cast<double>(m);
                double x = 0.5 * (dom.a + dom.b) + 0.5 * (dom.b - dom.a) * std::cos(th);
                cur = std::max(cur, std::abs(eval_poly(coeffs, {x, 0})));
            }
        }
        if (prev >= 0 && std::abs(cur - prev) <= tol * std::max(1.0, cur))
            return cur;
        prev = cur;
        m *= 2;
    }
    return prev;
}

// |P(t)| <= e^{n g(t)} ||P||_K at every trial point, within 1e-12 relative
inline BernsteinResult bernstein_check(const std::vector<std::complex<double>> &coeffs,
                                       const GreenDomain &dom,
                                       const std::vector<std::complex<double>> &trial_points) {
    int n = static_cast<int>(coeffs.size()) - 1;
    while (n > 0 && std::abs(coeffs[n]) == 0)
        --n;
    BernsteinResult res;
    res.sup_norm = sup_norm_on(dom, coeffs);
    if (res.sup_norm == 0)
        return res; // zero polynomial
    for (auto &t : trial_points) {
        double g = green(dom, t);
        double bound = std::exp(n * g) * res.sup_norm;
        double ratio = std::abs(eval_poly(coeffs, t)) / bound;
        res.max_ratio = std::max(res.max_ratio, ratio);
        if (ratio > 1 + 1e-12)
            res.pass = false;
    }
    return res;
}

// --- Family scans --------------------------------------------------------

struct ScanRow {
    std::complex<double> t;
    double radius_estimate = 0;
    int fit_lo = 0, fit_hi = 0;
    double min_divisor = 0;
    double probe_tail = 0;
    std::string status = "ok";
    std::map<int, double> r_l; // per-degree maxima, reused by the predictor
};

struct ScanResult {
    std::vector<ScanRow> rows;
    // per-degree max over the grid (Bernstein-side input)
    std::map<int, double> grid_max;

    std::string csv() const {
        std::ostringstream os;
        os << "t_re,t_im,radius_est,fit_window,min_divisor,probe_tail,status\n";
        for (auto &r : rows)
            os << r.t.real() << ',' << r.t.imag() << ',' << r.radius_estimate << ','
               << r.fit_lo << '-' << r.fit_hi << ',' << r.min_divisor << ',' << r.probe_tail
               << ',' << r.status << "\n";
        return os.str();
    }
};

inline HamiltonianSpec scan_member(const PencilSpec &pencil, int order) {
    HamiltonianSpec spec = pencil.base;
    spec.order = order;
    spec.higher_terms = spec.higher_terms.truncated(order);
    return spec;
}

// run the engine at each grid point in the float domain
inline ScanResult family_scan(const PencilSpec &pencil,
                              const std::vector<std::complex<double>> &grid, int order,
                              double rho0, const EngineOptions &opt = {}) {
    if (grid.empty())
        throw SpecError("scan grid is empty");
    ScanResult out;
    out.rows.resize(grid.size());
    GradedSeries<Radical> diff = pencil.direction.higher_terms - pencil.base.higher_terms;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (size_t i = 0; i < grid.size(); ++i) {
        apply_thread_precision();
        ScanRow row;
        row.t = grid[i];
        try {
            HamiltonianSpec spec = scan_member(pencil, order);
            GradedSeries<CFloat> H = build_hamiltonian<CFloat>(spec, order);
            CFloat t0{Real(grid[i].real()), Real(grid[i].imag())};
            for (auto &[l, p] : diff.parts()) {
                if (l > order)
                    break;
                for (auto &[e, c] : p)
                    H.add_term(e, ScalarTraits<CFloat>::lift(c) * t0);
            }
            auto art = normalize_with<CFloat>(spec, H, opt);
            auto rep = growth(art, rho0);
            row.radius_estimate = rep.radius_estimate;
            row.fit_lo = rep.fit_lo;
            row.fit_hi = rep.fit_hi;
            row.min_divisor = rep.min_divisor;
            row.probe_tail = rep.rho0_probe.empty() ? 0 : rep.rho0_probe.back();
            row.r_l = rep.r_l;
        } catch (const std::exception &err) {
            row.status = std::string("error: ") + err.what();
        }
        out.rows[i] = std::move(row);
    }
    for (auto &row : out.rows)
        for (auto &[l, r] : row.r_l) {
            auto [it, fresh] = out.grid_max.emplace(l, r);
            if (!fresh)
                it->second = std::max(it->second, r);
        }
    return out;
}

// Bernstein-style off-grid prediction: the degree-l coefficients of K_t
// are polynomials in t of degree <= l-2, so
//   max_i |K_i(t*)| <= e^{(l-2) g(t*)} * max_grid r_l
// for any domain containing the grid.
inline double predicted_bound(const ScanResult &scan, const GreenDomain &dom, int l,
                              std::complex<double> tstar) {
    auto it = scan.grid_max.find(l);
    if (it == scan.grid_max.end() || it->second == 0)
        return 0;
    return std::exp((l - 2) * green(dom, tstar)) * it->second;
}

// grid builders for the CLI: points on concentric rings, or a real segment
inline std::vector<std::complex<double>> disk_grid(std::complex<double> center, double radius,
                                                   int count) {
    std::vector<std::complex<double>> pts;
    int rings = std::max(1, static_cast<int>(std::floor(std::sqrt(count))));
    int per_ring = std::max(1, count / rings);
    for (int r = 1; r <= rings && static_cast<int>(pts.size()) < count; ++r) {
        double rad = radius * static_cast<double>(r) / rings;
        for (int i = 0; i < per_ring && static_cast<int>(pts.size()) < count; ++i) {
            double th = 2 * M_PI * static_cast<double>(i) / per_ring;
            pts.push_back(center + rad * std::complex<double>(std::cos(th), std::sin(th)));
        }
    }
    return pts;
}

inline std::vector<std::complex<double>> interval_grid(double a, double b, int count) {
    std::vector<std::complex<double>> pts;
    for (int i = 0; i < count; ++i)
        pts.emplace_back(a + (b - a) * (count == 1 ? 0.5 : static_cast<double>(i) / (count - 1)),
                         0.0);
    return pts;
}

} // namespace bnf
