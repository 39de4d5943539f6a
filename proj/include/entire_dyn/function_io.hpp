#pragma once

// Plain-text form of a FunctionSpec.
//
// A config block is a sequence of `key = value` statements separated by
// newlines or ';'. Blank statements and text after '#' are ignored. Keys:
//
//   family = polysin | expsum | sigma | poincare
//   polysin:  P = <complex list>, alpha = <complex>, beta = <complex>
//   expsum:   term = <complex list> | <complex>   (repeated; a_k coefficients | b_k)
//   sigma:    tau = <complex>
//   poincare: p = <complex list>, z0 = <complex>, lambda = <complex>, terms = <integer>
//
// A complex number is written "re,im" (a bare real is accepted on input). A
// complex list holds ascending-degree coefficients separated by whitespace.
// print() emits one statement per line with shortest round-trip decimals, so
// print(parse(print(f))) == print(f).

#include <cctype>
#include <charconv>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "function_kernel.hpp"

namespace entire_dyn {

namespace io_detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

inline double parse_real(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(x)) {
        throw ParseError("not a finite decimal number: '" + std::string(s) + "'");
    }
    return x;
}

inline std::string format_real(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        if (i > start) {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

} // namespace io_detail

inline Complex parse_complex(std::string_view s)
{
    const auto parts = io_detail::split(io_detail::trim(s), ',');
    if (parts.size() == 1) {
        return {io_detail::parse_real(parts[0]), 0.0};
    }
    if (parts.size() != 2) {
        throw ParseError("complex numbers are written re,im: '" + std::string(s) + "'");
    }
    return {io_detail::parse_real(parts[0]), io_detail::parse_real(parts[1])};
}

inline std::string format_complex(Complex z)
{
    return io_detail::format_real(z.real()) + "," + io_detail::format_real(z.imag());
}

inline std::vector<Complex> parse_complex_list(std::string_view s)
{
    std::vector<Complex> out;
    for (std::string_view tok : io_detail::split_ws(s)) {
        out.push_back(parse_complex(tok));
    }
    if (out.empty()) {
        throw ParseError("empty coefficient list");
    }
    return out;
}

inline std::string format_complex_list(std::span<const Complex> v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? " " : "") + format_complex(v[i]);
    }
    return out;
}

/// Statements of a config block in order of appearance.
inline std::vector<std::pair<std::string, std::string>> parse_statements(std::string_view text)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::string cleaned;
    bool comment = false;
    for (char c : text) {
        if (c == '\n') {
            comment = false;
            cleaned += ';';
        } else if (c == '#') {
            comment = true;
        } else if (!comment) {
            cleaned += c;
        }
    }
    for (std::string_view stmt : io_detail::split(cleaned, ';')) {
        stmt = io_detail::trim(stmt);
        if (stmt.empty()) {
            continue;
        }
        const std::size_t eq = stmt.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected key = value, got '" + std::string(stmt) + "'");
        }
        std::string key(io_detail::trim(stmt.substr(0, eq)));
        std::string value(io_detail::trim(stmt.substr(eq + 1)));
        if (key.empty()) {
            throw ParseError("empty key in '" + std::string(stmt) + "'");
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

/// Parses a config block. Unknown or repeated keys, missing keys and
/// parameters violating the family invariants are errors.
inline FunctionSpec parse_function(std::string_view text)
{
    std::map<std::string, std::string> kv;
    std::vector<std::string> terms;
    for (auto& [k, v] : parse_statements(text)) {
        if (k == "term") {
            terms.push_back(v);
        } else if (!kv.emplace(k, v).second) {
            throw ParseError("repeated key '" + k + "'");
        }
    }
    const auto take = [&](const std::string& key) -> std::string {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            throw ParseError("missing key '" + key + "'");
        }
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    const std::string family = take("family");
    const auto finish = [&](FunctionSpec f) {
        if (!kv.empty()) {
            throw ParseError("unknown key '" + kv.begin()->first + "' for family " + family);
        }
        if (family != "expsum" && !terms.empty()) {
            throw ParseError("key 'term' only applies to family expsum");
        }
        return f;
    };
    if (family == "polysin") {
        const Polynomial P(parse_complex_list(take("P")));
        const Complex alpha = parse_complex(take("alpha"));
        const Complex beta = parse_complex(take("beta"));
        return finish(FunctionSpec::polysin(P, alpha, beta));
    }
    if (family == "expsum") {
        std::vector<ExpSumTerm> ts;
        for (const std::string& t : terms) {
            const auto parts = io_detail::split(t, '|');
            if (parts.size() != 2) {
                throw ParseError("expsum term is '<coefficients> | <b>': '" + t + "'");
            }
            ts.push_back({Polynomial(parse_complex_list(parts[0])), parse_complex(parts[1])});
        }
        return finish(FunctionSpec::expsum(std::move(ts)));
    }
    if (family == "sigma") {
        const Complex tau = parse_complex(take("tau"));
        if (!(tau.imag() > 0.0)) {
            throw PreconditionError("sigma: Im tau must be positive");
        }
        return finish(FunctionSpec::sigma(tau));
    }
    if (family == "poincare") {
        const PolynomialSpec p(parse_complex_list(take("p")));
        const Complex z0 = parse_complex(take("z0"));
        const Complex lambda = parse_complex(take("lambda"));
        int n = 64;
        if (kv.count("terms")) {
            const std::string s = take("terms");
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
            if (ec != std::errc() || ptr != s.data() + s.size()) {
                throw ParseError("terms must be an integer: '" + s + "'");
            }
        }
        return finish(FunctionSpec::poincare(p, z0, lambda, n));
    }
    throw ParseError("unknown family '" + family + "'");
}

inline std::string print_function(const FunctionSpec& f)
{
    std::ostringstream os;
    switch (f.family()) {
    case Family::polysin: {
        const PolySin& p = f.as_polysin();
        os << "family = polysin\n"
           << "P = " << format_complex_list(p.P.coefficients()) << "\n"
           << "alpha = " << format_complex(p.alpha) << "\n"
           << "beta = " << format_complex(p.beta) << "\n";
        break;
    }
    case Family::expsum:
        os << "family = expsum\n";
        for (const ExpSumTerm& t : f.as_expsum().terms) {
            os << "term = " << format_complex_list(t.a.coefficients()) << " | " << format_complex(t.b) << "\n";
        }
        break;
    case Family::sigma: os << "family = sigma\ntau = " << format_complex(f.as_sigma().tau) << "\n"; break;
    case Family::poincare: {
        const poincare::PoincareFunction& fn = f.as_poincare().fn;
        os << "family = poincare\n"
           << "p = " << format_complex_list(fn.p.poly().coefficients()) << "\n"
           << "z0 = " << format_complex(fn.z0) << "\n"
           << "lambda = " << format_complex(fn.lambda) << "\n"
           << "terms = " << fn.series.truncation() << "\n";
        break;
    }
    }
    return os.str();
}

} // namespace entire_dyn
