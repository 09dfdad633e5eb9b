#pragma once

// Text dump format for series, one term per line:
//   l  a1 .. an  b1 .. bn  coeff
// sorted in the canonical (graded lexicographic) order. Round trips
// bit-exactly for the exact coefficient domains. Multi-component bundles
// (phi, psi, xi, eta) separate components with "component k" lines.

#include "bnf/series.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace bnf {

struct DumpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class S> void write_series(std::ostream &os, const GradedSeries<S> &s) {
    os << "# n=" << s.dof() << " trunc=" << s.trunc() << " domain=" << ScalarTraits<S>::name
       << "\n";
    for (auto &[l, p] : s.parts())
        for (auto &[e, c] : p) {
            os << l;
            for (int v : e)
                os << ' ' << v;
            os << "  " << ScalarTraits<S>::str(c) << "\n";
        }
}

template <class S> GradedSeries<S> read_series(std::istream &is) {
    int n = -1, trunc = -1;
    GradedSeries<S> s;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string tok;
            while (hs >> tok) {
                if (tok.rfind("n=", 0) == 0)
                    n = std::stoi(tok.substr(2));
                else if (tok.rfind("trunc=", 0) == 0)
                    trunc = std::stoi(tok.substr(6));
            }
            if (n < 0 || trunc < 0)
                throw DumpError("dump header missing n=/trunc=");
            s = GradedSeries<S>(n, trunc);
            have_header = true;
            continue;
        }
        if (!have_header)
            throw DumpError("dump term line before header");
        std::istringstream ls(line);
        int l;
        if (!(ls >> l))
            throw DumpError("bad dump line: " + line);
        Exponent e(2 * n);
        for (int i = 0; i < 2 * n; ++i)
            if (!(ls >> e[i]))
                throw DumpError("bad exponent in dump line: " + line);
        std::string coeff;
        std::getline(ls, coeff);
        size_t start = coeff.find_first_not_of(" \t");
        if (start == std::string::npos)
            throw DumpError("missing coefficient in dump line: " + line);
        if (exp_degree(e) != l)
            throw DumpError("degree/exponent mismatch in dump line: " + line);
        s.add_term(e, ScalarTraits<S>::parse(coeff.substr(start)));
    }
    if (!have_header)
        throw DumpError("empty dump");
    return s;
}

template <class S>
void write_bundle(std::ostream &os, const std::vector<GradedSeries<S>> &comps) {
    for (size_t k = 0; k < comps.size(); ++k) {
        os << "component " << k + 1 << "\n";
        write_series(os, comps[k]);
    }
}

template <class S> std::vector<GradedSeries<S>> read_bundle(std::istream &is) {
    std::vector<GradedSeries<S>> comps;
    std::string chunk, line;
    auto flush = [&] {
        if (!chunk.empty()) {
            std::istringstream cs(chunk);
            comps.push_back(read_series<S>(cs));
            chunk.clear();
        }
    };
    while (std::getline(is, line)) {
        if (line.rfind("component ", 0) == 0) {
            flush();
            continue;
        }
        chunk += line;
        chunk += '\n';
    }
    flush();
    return comps;
}

template <class S> std::string series_str(const GradedSeries<S> &s) {
    std::ostringstream os;
    write_series(os, s);
    return os.str();
}

template <class S> GradedSeries<S> series_from_str(const std::string &text) {
    std::istringstream is(text);
    return read_series<S>(is);
}

} // namespace bnf
