#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <openssl/evp.h>

#include "dlss/experiments.hpp"
#include "dlss/simulation.hpp"

// Output formats of the command-line tool. Numbers are written with
// std::to_chars in scientific notation with 17 significant digits, so the
// files do not depend on the C or C++ locale.

namespace dlss::io {

inline std::string format_real(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

inline std::string format_int(long long x) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline constexpr const char* snapshots_header = "time,x,u";
inline constexpr const char* diagnostics_header =
    "step,time,mass,fisher,entropy,hellinger_to_1,min_u,newton_iters,newton_residual,v_sign_flips";
inline constexpr const char* convergence_header = "parameter,error_hellinger,error_hellinger_sq,rate";

inline std::string snapshots_csv(const Trajectory<double>& traj) {
    std::string out = snapshots_header;
    out += '\n';
    for (const auto& s : traj.snapshots) {
        const auto& g = s.u.grid();
        for (std::size_t i = 0; i < g.n(); ++i) {
            out += format_real(s.time) + ',' + format_real(g.node(i)) + ',' + format_real(s.u[i]) + '\n';
        }
    }
    return out;
}

inline std::string diagnostics_csv(const Trajectory<double>& traj) {
    std::string out = diagnostics_header;
    out += '\n';
    for (const auto& d : traj.diagnostics) {
        out += format_int(d.step_index) + ',' + format_real(d.time) + ',' + format_real(d.metrics.mass) + ',' +
               format_real(d.metrics.fisher) + ',' + format_real(d.metrics.entropy) + ',' +
               format_real(d.metrics.hellinger_to_steady) + ',' + format_real(d.metrics.min_value) + ',' +
               format_int(d.newton.iterations) + ',' + format_real(d.newton.final_residual_norm) + ',' +
               format_int(d.v_sign_flips) + '\n';
    }
    return out;
}

inline std::string convergence_csv(const ConvergenceReport<double>& rep) {
    std::string out = convergence_header;
    out += '\n';
    for (const auto& r : rep.rows) {
        out += format_real(r.parameter) + ',' + format_real(r.error) + ',' + format_real(r.error_sq) + ',' +
               (r.rate ? format_real(*r.rate) : std::string{}) + '\n';
    }
    return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw std::runtime_error("failed writing " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

/// UTC wall-clock time as 2026-01-31T12:34:56Z.
inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/**
 * Reads a custom initial datum: one nonnegative value per node, separated by
 * whitespace, commas or newlines. Lines starting with '#' are ignored.
 */
inline std::vector<double> read_samples(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.front() == '#') continue;
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t' || c == '\r') c = ' ';
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            double v = 0;
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
                throw DomainError("cannot parse sample '" + tok + "' in " + path.string());
            }
            values.push_back(v);
        }
    }
    return values;
}

} // namespace dlss::io
