// Command-line front end: normalize / audit / scan / growth / integrals.
// Exit codes: 0 ok, 1 property FAIL, 2 input error, 3 internal error.
// Every run writes a manifest.json next to its outputs; files are written
// atomically (temp + rename).

#include "bnf/convergence.hpp"
#include "bnf/dump.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

using namespace bnf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int EXIT_PROPERTY_FAIL = 1;
constexpr int EXIT_INPUT_ERROR = 2;
constexpr int EXIT_INTERNAL = 3;

struct RunConfig {
    std::string out_dir = "out";
    unsigned precision = 0; // 0 = take it from the spec / default
    unsigned seed = 1;
};

void write_file_atomic(const fs::path &path, const std::string &content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot write " + tmp.string());
        f << content;
    }
    fs::rename(tmp, path);
}

json base_manifest(const std::string &command, const std::vector<std::string> &inputs,
                   const RunConfig &cfg) {
    json m;
    m["command"] = command;
    m["inputs"] = inputs;
    m["seed"] = cfg.seed;
    m["precision_bits"] = g_precision_bits.load();
    m["version"] = "1.0.0";
    return m;
}

void finish_manifest(json &m, const RunConfig &cfg, double seconds,
                     const std::vector<std::string> &outputs) {
    m["seconds"] = seconds;
    m["outputs"] = outputs;
    write_file_atomic(fs::path(cfg.out_dir) / "manifest.json", m.dump(2) + "\n");
}

HamiltonianSpec load_spec(const std::string &path, int order_override,
                          const std::string &mode_override) {
    auto spec = parse_spec_file(path);
    if (order_override > 0) {
        spec.order = order_override;
        spec.higher_terms = spec.higher_terms.truncated(spec.order);
    }
    if (mode_override == "phi")
        spec.mode = NormalizationMode::Phi;
    else if (mode_override == "zero")
        spec.mode = NormalizationMode::Zero;
    else if (!mode_override.empty())
        throw SpecError("mode must be 'phi' or 'zero'");
    return spec;
}

void apply_precision(const RunConfig &cfg, const HamiltonianSpec &spec) {
    unsigned bits = spec.float_bits;
    if (const char *env = std::getenv("BNF_PRECISION"))
        bits = static_cast<unsigned>(std::stoul(env));
    if (cfg.precision > 0)
        bits = cfg.precision;
    set_precision_bits(bits);
}

std::string witness_str(const Exponent &e) {
    int n = static_cast<int>(e.size()) / 2;
    std::ostringstream os;
    os << "alpha=(";
    for (int k = 0; k < n; ++k)
        os << (k ? "," : "") << e[k];
    os << ") beta=(";
    for (int k = 0; k < n; ++k)
        os << (k ? "," : "") << e[n + k];
    os << ")";
    return os.str();
}

void require_nonresonant(const HamiltonianSpec &spec) {
    if (auto w = check_nonresonant(spec.lambda, spec.order))
        throw SpecError("resonant frequencies up to order " + std::to_string(spec.order) +
                        ": witness " + witness_str(w->exponent));
}

template <class S> std::string run_log(const NormalFormArtifacts<S> &art) {
    std::ostringstream os;
    os << "order,k_terms,v_terms,min_divisor,modes_coincide,seconds\n";
    for (auto &l : art.log)
        os << l.degree << ',' << l.k_terms << ',' << l.v_terms << ',' << l.min_divisor << ','
           << (l.modes_coincide ? "yes" : "no") << ',' << l.seconds << "\n";
    os << "min divisor overall: " << art.min_divisor.magnitude;
    if (!art.min_divisor.exponent.empty())
        os << " at " << witness_str(art.min_divisor.exponent) << " value "
           << art.min_divisor.value;
    os << "\n";
    return os.str();
}

template <class S>
std::vector<std::string> write_normalize_outputs(const RunConfig &cfg,
                                                 const NormalFormArtifacts<S> &art) {
    fs::path dir(cfg.out_dir);
    std::vector<std::string> outs;
    auto put = [&](const std::string &name, const std::string &content) {
        write_file_atomic(dir / name, content);
        outs.push_back((dir / name).string());
    };
    put("K.dump", series_str(art.K));
    put("v.dump", series_str(art.v));
    std::ostringstream phis, psis;
    write_bundle(phis, art.phi);
    write_bundle(psis, art.psi);
    put("phi.dump", phis.str());
    put("psi.dump", psis.str());
    put("residual.dump", series_str(phi_residual(art)));
    put("run.log", run_log(art));
    return outs;
}

std::vector<std::complex<double>> parse_grid(const std::string &text) {
    auto split = [](const std::string &s, char sep) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == sep) {
                out.push_back(cur);
                cur.clear();
            } else
                cur += c;
        }
        out.push_back(cur);
        return out;
    };
    auto parts = split(text, ':');
    if (parts[0] == "disk" && parts.size() == 4)
        return disk_grid({std::stod(parts[1]), 0.0}, std::stod(parts[2]), std::stoi(parts[3]));
    if (parts[0] == "interval" && parts.size() == 4)
        return interval_grid(std::stod(parts[1]), std::stod(parts[2]), std::stoi(parts[3]));
    if (parts[0] == "list" && parts.size() == 2) {
        std::vector<std::complex<double>> pts;
        for (auto &v : split(parts[1], ',')) {
            auto plus = v.find('j');
            if (plus != std::string::npos) {
                // re+imj or imj
                auto body = v.substr(0, plus);
                auto sep = body.find_last_of("+-", std::string::npos);
                if (sep != std::string::npos && sep > 0)
                    pts.emplace_back(std::stod(body.substr(0, sep)), std::stod(body.substr(sep)));
                else
                    pts.emplace_back(0.0, std::stod(body));
            } else
                pts.emplace_back(std::stod(v), 0.0);
        }
        return pts;
    }
    throw SpecError("bad --grid; use disk:c:R:count, interval:a:b:count, or list:t1,t2,...");
}

int cmd_normalize(const std::string &spec_path, int order, const std::string &mode,
                  RunConfig cfg) {
    auto t0 = std::chrono::steady_clock::now();
    auto spec = load_spec(spec_path, order, mode);
    apply_precision(cfg, spec);
    require_nonresonant(spec);
    if (spec.domain == ScalarDomain::Param)
        throw SpecError("domain=param needs a pencil; use the audit command");

    json m = base_manifest("normalize", {spec_path}, cfg);
    m["order"] = spec.order;
    m["mode"] = spec.mode == NormalizationMode::Phi ? "phi" : "zero";
    std::vector<std::string> outs;
    if (spec.domain == ScalarDomain::Float) {
        auto art = normalize<CFloat>(spec);
        outs = write_normalize_outputs(cfg, art);
        m["min_divisor"] = art.min_divisor.magnitude;
    } else {
        auto art = normalize<Radical>(spec);
        outs = write_normalize_outputs(cfg, art);
        m["min_divisor"] = art.min_divisor.magnitude;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    finish_manifest(m, cfg, secs, outs);
    std::cout << "normalize: wrote " << outs.size() << " files to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_audit(const std::string &base_path, const std::string &dir_path, int order,
              int spot_checks, RunConfig cfg) {
    auto t0 = std::chrono::steady_clock::now();
    PencilSpec pencil{load_spec(base_path, order, ""), load_spec(dir_path, order, "")};
    pencil.validate();
    require_nonresonant(pencil.base);

    auto rep = audit(pencil);
    std::string csv = rep.csv();

    bool spot_ok = true;
    if (spot_checks > 0) {
        std::mt19937 rng(cfg.seed);
        std::ostringstream extra;
        for (int i = 0; i < spot_checks; ++i) {
            int l = std::uniform_int_distribution<int>(3, pencil.base.order)(rng);
            std::vector<Rational> nodes;
            std::set<Rational> used;
            std::uniform_int_distribution<int> num(-12, 12), den(1, 4);
            while (static_cast<int>(nodes.size()) < l + 1) {
                Rational t0r(num(rng), den(rng));
                if (used.insert(t0r).second)
                    nodes.push_back(t0r);
            }
            auto res = spot_check_interpolation(pencil, l, nodes);
            spot_ok = spot_ok && res.match;
            extra << "spot-check," << l << ",0," << (res.match ? "0,0,PASS" : "1,0,FAIL")
                  << "\n";
            if (!res.match)
                std::cerr << "spot check mismatch: " << res.mismatch << "\n";
        }
        csv += extra.str();
    }

    write_file_atomic(fs::path(cfg.out_dir) / "audit.csv", csv);
    json m = base_manifest("audit", {base_path, dir_path}, cfg);
    m["all_pass"] = rep.all_pass && spot_ok;
    m["spot_checks"] = spot_checks;
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    finish_manifest(m, cfg, secs, {(fs::path(cfg.out_dir) / "audit.csv").string()});
    std::cout << csv;
    return rep.all_pass && spot_ok ? 0 : EXIT_PROPERTY_FAIL;
}

int cmd_scan(const std::string &base_path, const std::string &dir_path, int order,
             const std::string &grid_text, double rho0, const std::string &predict,
             RunConfig cfg) {
    auto t0 = std::chrono::steady_clock::now();
    PencilSpec pencil{load_spec(base_path, 0, ""), load_spec(dir_path, 0, "")};
    pencil.validate();
    int N = order > 0 ? order : (pencil.base.n == 1 ? 20 : 12);
    apply_precision(cfg, pencil.base);

    auto grid = parse_grid(grid_text);
    auto scan = family_scan(pencil, grid, N, rho0);
    std::string csv = scan.csv();
    write_file_atomic(fs::path(cfg.out_dir) / "scan.csv", csv);
    std::cout << csv;

    if (!predict.empty()) {
        // prediction needs a domain containing the grid; take the tight disk
        double radius = 0;
        for (auto &t : grid)
            radius = std::max(radius, std::abs(t));
        auto dom = GreenDomain::disk({0.0, 0.0}, std::max(radius, 1e-9));
        auto tstar = parse_grid("list:" + predict).at(0);
        std::cout << "predicted bounds at t* = (" << tstar.real() << "," << tstar.imag()
                  << "):\n";
        for (int l = 3; l <= N; ++l) {
            double b = predicted_bound(scan, dom, l, tstar);
            if (b > 0)
                std::cout << "  l=" << l << "  max|K_i(t*)| <= " << b << "\n";
        }
    }

    json m = base_manifest("scan", {base_path, dir_path}, cfg);
    m["order"] = N;
    m["rho0"] = rho0;
    m["grid_points"] = grid.size();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    finish_manifest(m, cfg, secs, {(fs::path(cfg.out_dir) / "scan.csv").string()});
    return 0;
}

int cmd_growth(const std::string &spec_path, int order, double rho0, RunConfig cfg) {
    auto t0 = std::chrono::steady_clock::now();
    auto spec = load_spec(spec_path, order, "");
    apply_precision(cfg, spec);
    require_nonresonant(spec);

    GrowthReport rep;
    if (spec.domain == ScalarDomain::Float)
        rep = growth(normalize<CFloat>(spec), rho0);
    else
        rep = growth(normalize<Radical>(spec), rho0);
    std::string csv = rep.csv();
    write_file_atomic(fs::path(cfg.out_dir) / "growth.csv", csv);
    std::cout << csv;
    std::cout << "radius_estimate: "
              << (rep.radius_infinite() ? std::string("inf") : std::to_string(rep.radius_estimate))
              << " (fit " << rep.fit_lo << "-" << rep.fit_hi << ", slope " << rep.fit_slope
              << ", rms " << rep.fit_residual << ")\n";

    json m = base_manifest("growth", {spec_path}, cfg);
    m["order"] = spec.order;
    m["rho0"] = rho0;
    m["radius_estimate"] = rep.radius_estimate;
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    finish_manifest(m, cfg, secs, {(fs::path(cfg.out_dir) / "growth.csv").string()});
    return 0;
}

int cmd_integrals(const std::string &spec_path, int order, const std::string &universal,
                  bool check_bracket, RunConfig cfg) {
    auto t0 = std::chrono::steady_clock::now();
    auto spec = load_spec(spec_path, order, "");
    apply_precision(cfg, spec);
    require_nonresonant(spec);
    if (spec.domain == ScalarDomain::Float)
        throw SpecError("integrals command runs in the exact domain");

    auto art = normalize<Radical>(spec);
    auto inv = inverse_maps(art);
    auto fis = first_integrals(inv, spec.order);

    std::vector<GradedSeries<Radical>> comps;
    for (auto &fi : fis)
        comps.push_back(fi.P);
    if (!universal.empty()) {
        auto F = OmegaPoly::parse(universal, spec.n);
        auto fi = universal_integral(F, inv, spec.order);
        comps.push_back(fi.P);
    }
    std::ostringstream bundle;
    write_bundle(bundle, comps);
    write_file_atomic(fs::path(cfg.out_dir) / "integrals.dump", bundle.str());

    int rc = 0;
    if (check_bracket) {
        auto H = build_hamiltonian<Radical>(spec, spec.order);
        for (size_t i = 0; i < comps.size(); ++i) {
            auto res = bracket_residual(comps[i], H, spec.order);
            double worst = 0;
            for (auto &[l, mag] : res)
                worst = std::max(worst, mag);
            std::cout << "integral " << i + 1 << " bracket residual per degree:";
            for (auto &[l, mag] : res)
                std::cout << ' ' << l << ':' << mag;
            std::cout << "\n";
            if (worst != 0)
                rc = EXIT_PROPERTY_FAIL;
        }
    }

    json m = base_manifest("integrals", {spec_path}, cfg);
    m["components"] = comps.size();
    m["universal"] = universal;
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    finish_manifest(m, cfg, secs, {(fs::path(cfg.out_dir) / "integrals.dump").string()});
    std::cout << "integrals: wrote " << comps.size() << " components\n";
    return rc;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Birkhoff normal forms: exact construction, degree audits, and growth scans"};
    app.require_subcommand(1);

    RunConfig cfg;
    app.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    app.add_option("--precision", cfg.precision, "float precision in bits (overrides spec and BNF_PRECISION)");
    app.add_option("--seed", cfg.seed, "seed for randomized sub-suites")->capture_default_str();

    std::string spec_path, base_path, dir_path, mode, grid_text, predict, universal;
    int order = 0, spot_checks = 0;
    double rho0 = 0.5;
    bool check_bracket = false;

    auto *nrm = app.add_subcommand("normalize", "run the normal-form engine");
    nrm->add_option("spec", spec_path, "Hamiltonian spec file")->required();
    nrm->add_option("--order", order, "truncation order override");
    nrm->add_option("--mode", mode, "phi | zero");

    auto *aud = app.add_subcommand("audit", "degree-bound audit over a pencil");
    aud->add_option("base", base_path, "H0 spec file")->required();
    aud->add_option("direction", dir_path, "H1 spec file")->required();
    aud->add_option("--order", order, "truncation order override");
    aud->add_option("--spot-check", spot_checks, "number of interpolation oracle rows");

    auto *scn = app.add_subcommand("scan", "growth scan over a parameter grid");
    scn->add_option("base", base_path, "H0 spec file")->required();
    scn->add_option("direction", dir_path, "H1 spec file")->required();
    scn->add_option("--grid", grid_text, "disk:c:R:count | interval:a:b:count | list:t1,...")
        ->required();
    scn->add_option("--order", order, "truncation order (default 20 for 1 dof, 12 for 2)");
    scn->add_option("--rho0", rho0, "probe radius")->capture_default_str();
    scn->add_option("--predict", predict, "off-grid t* for the Bernstein-side bound");

    auto *gro = app.add_subcommand("growth", "coefficient growth of one Hamiltonian");
    gro->add_option("spec", spec_path, "Hamiltonian spec file")->required();
    gro->add_option("--order", order, "truncation order override");
    gro->add_option("--rho0", rho0, "probe radius")->capture_default_str();

    auto *itg = app.add_subcommand("integrals", "first integrals and bracket checks");
    itg->add_option("spec", spec_path, "Hamiltonian spec file")->required();
    itg->add_option("--order", order, "truncation order override");
    itg->add_option("--universal", universal, "F(w1,...,wn), e.g. \"w1^2+w2\"");
    itg->add_flag("--check-bracket", check_bracket, "print per-degree bracket residuals");

    CLI11_PARSE(app, argc, argv);

    try {
        if (nrm->parsed())
            return cmd_normalize(spec_path, order, mode, cfg);
        if (aud->parsed())
            return cmd_audit(base_path, dir_path, order, spot_checks, cfg);
        if (scn->parsed())
            return cmd_scan(base_path, dir_path, order, grid_text, rho0, predict, cfg);
        if (gro->parsed())
            return cmd_growth(spec_path, order, rho0, cfg);
        if (itg->parsed())
            return cmd_integrals(spec_path, order, universal, check_bracket, cfg);
    } catch (const SpecError &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return EXIT_INPUT_ERROR;
    } catch (const ScalarError &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return EXIT_INPUT_ERROR;
    } catch (const DumpError &e) {
        std::cerr << "input error: " << e.what() << "\n";
        return EXIT_INPUT_ERROR;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return EXIT_INTERNAL;
    }
    return EXIT_INTERNAL;
}
