// SPDX-License-Identifier: Apache-2.0
#include "evqmc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "evqmc/lattice.hpp"
#include "evqmc/numformat.hpp"

namespace evqmc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

long long to_int(const std::string& v, int line) {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        fail(line, "expected an integer, got '" + v + "'");
    return out;
}

std::uint64_t to_u64(const std::string& v, int line) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        fail(line, "expected an unsigned integer, got '" + v + "'");
    return out;
}

double to_real(const std::string& v, int line) {
    double out = 0.0;
    if (!parse_double(v, out)) fail(line, "expected a number, got '" + v + "'");
    return out;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(v);
    while (std::getline(is, cur, ',')) parts.push_back(trim(cur));
    return parts;
}

} // namespace

RunConfig parse_config(std::istream& is) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string text = trim(raw);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) fail(line, "empty key");
        if (value.empty()) fail(line, "empty value for '" + key + "'");
        if (!seen.insert(key).second) fail(line, "repeated key '" + key + "'");

        if (key == "family") {
            if (value == family_name(Family::global_trig)) cfg.family = Family::global_trig;
            else if (value == family_name(Family::disjoint_indicator))
                cfg.family = Family::disjoint_indicator;
            else if (value == family_name(Family::haar_overlap))
                cfg.family = Family::haar_overlap;
            else
                fail(line, "unknown family '" + value +
                               "' (global-trig, disjoint-indicator, haar-overlap)");
        } else if (key == "domain") {
            if (value == "interval") cfg.domain = DomainKind::unit_interval;
            else if (value == "square") cfg.domain = DomainKind::unit_square;
            else fail(line, "unknown domain '" + value + "' (interval, square)");
        } else if (key == "h") {
            if (const auto slash = value.find('/'); slash != std::string::npos) {
                const std::string num = trim(value.substr(0, slash));
                const std::string den = trim(value.substr(slash + 1));
                if (num != "1") fail(line, "mesh size fractions must be 1/n");
                const long long n = to_int(den, line);
                if (n < 2) fail(line, "mesh size 1/n needs n >= 2");
                cfg.h = 1.0 / static_cast<double>(n);
            } else {
                cfg.h = to_real(value, line);
            }
            if (!(cfg.h > 0.0 && cfg.h < 1.0)) fail(line, "mesh size must lie in (0, 1)");
        } else if (key == "s_max") {
            cfg.s_max = static_cast<int>(to_int(value, line));
            if (cfg.s_max < 1) fail(line, "s_max must be >= 1");
        } else if (key == "theta") {
            cfg.theta = to_real(value, line);
        } else if (key == "scale") {
            cfg.scale = to_real(value, line);
        } else if (key == "p") {
            cfg.p = to_real(value, line);
            if (cfg.p < 0.0 || cfg.p > 1.0) fail(line, "p must lie in [0, 1] (0 = default)");
        } else if (key == "tol") {
            cfg.tol = to_real(value, line);
            if (!(cfg.tol > 0.0)) fail(line, "tol must be positive");
        } else if (key == "max_iter") {
            cfg.max_iter = static_cast<int>(to_int(value, line));
            if (cfg.max_iter < 1) fail(line, "max_iter must be >= 1");
        } else if (key == "seed") {
            cfg.seed = to_u64(value, line);
        } else if (key == "s_list") {
            cfg.s_list.clear();
            for (const std::string& part : split_list(value)) {
                const long long s = to_int(part, line);
                if (s < 1) fail(line, "s_list entries must be >= 1");
                if (!cfg.s_list.empty() && s <= cfg.s_list.back())
                    fail(line, "s_list must strictly ascend");
                cfg.s_list.push_back(static_cast<int>(s));
            }
            if (cfg.s_list.empty()) fail(line, "s_list must be nonempty");
        } else if (key == "N_list") {
            cfg.N_list.clear();
            for (const std::string& part : split_list(value)) {
                const std::uint64_t n = to_u64(part, line);
                if (!is_prime(n)) fail(line, "N_list entry " + part + " is not prime");
                if (!cfg.N_list.empty() && n <= cfg.N_list.back())
                    fail(line, "N_list must strictly ascend");
                cfg.N_list.push_back(n);
            }
            if (cfg.N_list.empty()) fail(line, "N_list must be nonempty");
        } else if (key == "R") {
            cfg.R = static_cast<int>(to_int(value, line));
            if (cfg.R < 1) fail(line, "R must be >= 1");
        } else if (key == "fd_step") {
            cfg.fd_step = to_real(value, line);
            if (!(cfg.fd_step > 0.0)) fail(line, "fd_step must be positive");
        } else if (key == "functional") {
            if (value == "none") cfg.functional = FunctionalKind::none;
            else if (value == "mean") cfg.functional = FunctionalKind::mean;
            else if (value == "left-half-indicator")
                cfg.functional = FunctionalKind::left_half_indicator;
            else
                fail(line, "unknown functional '" + value +
                               "' (none, mean, left-half-indicator)");
        } else {
            fail(line, "unknown key '" + key + "'");
        }
    }
    if (!seen.count("family"))
        throw std::runtime_error("config: required key 'family' is missing");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open '" + path + "'");
    return parse_config(is);
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "family = " << family_name(cfg.family) << '\n';
    os << "domain = "
       << (cfg.domain == DomainKind::unit_interval ? "interval" : "square") << '\n';
    const double inv = 1.0 / cfg.h;
    const long long n = std::llround(inv);
    if (n >= 2 && std::abs(inv - static_cast<double>(n)) < 1e-9 * inv)
        os << "h = 1/" << n << '\n';
    else
        os << "h = " << format_double(cfg.h) << '\n';
    os << "s_max = " << cfg.s_max << '\n';
    os << "theta = " << format_double(cfg.theta) << '\n';
    os << "scale = " << format_double(cfg.scale) << '\n';
    os << "p = " << format_double(cfg.p) << '\n';
    os << "tol = " << format_double(cfg.tol) << '\n';
    os << "max_iter = " << cfg.max_iter << '\n';
    os << "seed = " << cfg.seed << '\n';
    os << "s_list = ";
    for (std::size_t i = 0; i < cfg.s_list.size(); ++i)
        os << (i ? "," : "") << cfg.s_list[i];
    os << '\n';
    os << "N_list = ";
    for (std::size_t i = 0; i < cfg.N_list.size(); ++i)
        os << (i ? "," : "") << cfg.N_list[i];
    os << '\n';
    os << "R = " << cfg.R << '\n';
    os << "fd_step = " << format_double(cfg.fd_step) << '\n';
    os << "functional = "
       << (cfg.functional == FunctionalKind::none
               ? "none"
               : cfg.functional == FunctionalKind::mean ? "mean" : "left-half-indicator")
       << '\n';
    return os.str();
}

} // namespace evqmc
