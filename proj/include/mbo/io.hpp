#pragma once

// Persistence: the bit-exact binary trajectory format and the CSV field
// snapshot format.
//
// Trajectory file layout (little-endian throughout):
//   magic "MBOT", u8 version = 1,
//   u64 N, u64 M, f64 t0, f64 dt, u8 is_real,
//   M blocks of N coefficients as (f64 re, f64 im), k ascending from -N/2,
//   optional trailing u8 0xFF marker on files flushed after a blow-up.
//
// Field CSV: header `k,re,im`, one row per represented frequency, ascending.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbo/equations.hpp"
#include "mbo/field.hpp"
#include "mbo/report.hpp"

namespace mbo::io {

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}
inline void put_f64(std::string& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct Reader {
    const std::string& data;
    std::size_t pos = 0;

    std::uint8_t u8() {
        if (pos + 1 > data.size()) throw std::runtime_error("trajectory file truncated");
        return static_cast<std::uint8_t>(data[pos++]);
    }
    std::uint64_t u64() {
        if (pos + 8 > data.size()) throw std::runtime_error("trajectory file truncated");
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b)
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(data[pos + b])) << (8 * b);
        pos += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    bool at_end() const { return pos == data.size(); }
};

}  // namespace detail

struct TrajectoryFile {
    equations::Trajectory trajectory;
    bool truncated = false;  // flushed after a blow-up
};

inline std::string encode_trajectory(const equations::Trajectory& traj, bool truncated = false) {
    std::string out;
    out += "MBOT";
    out.push_back(1);
    detail::put_u64(out, static_cast<std::uint64_t>(traj.grid.n));
    detail::put_u64(out, static_cast<std::uint64_t>(traj.size()));
    detail::put_f64(out, traj.t0);
    detail::put_f64(out, traj.dt);
    const bool is_real = !traj.snapshots.empty() && traj.snapshots.front().is_real();
    out.push_back(is_real ? 1 : 0);
    for (const auto& snap : traj.snapshots)
        for (const cplx& z : snap.coeffs()) {
            detail::put_f64(out, z.real());
            detail::put_f64(out, z.imag());
        }
    if (truncated) out.push_back(static_cast<char>(0xFF));
    return out;
}

inline TrajectoryFile decode_trajectory(const std::string& data) {
    detail::Reader r{data};
    if (data.size() < 5 || data.compare(0, 4, "MBOT") != 0)
        throw std::runtime_error("not a trajectory file (bad magic)");
    r.pos = 4;
    const std::uint8_t version = r.u8();
    if (version != 1) throw std::runtime_error("unsupported trajectory format version");
    const auto n = static_cast<int>(r.u64());
    const auto m = r.u64();
    const double t0 = r.f64();
    const double dt = r.f64();
    const bool is_real = r.u8() != 0;

    const Grid grid(n);
    equations::Trajectory traj{grid, t0, dt, {}};
    traj.snapshots.reserve(m);
    for (std::uint64_t s = 0; s < m; ++s) {
        std::vector<cplx> c(static_cast<std::size_t>(n));
        for (auto& z : c) {
            const double re = r.f64();
            const double im = r.f64();
            z = cplx(re, im);
        }
        traj.snapshots.emplace_back(grid, std::move(c), is_real);
    }
    bool truncated = false;
    if (!r.at_end()) {
        if (r.u8() == 0xFF && r.at_end())
            truncated = true;
        else
            throw std::runtime_error("trailing bytes in trajectory file");
    }
    return {std::move(traj), truncated};
}

inline void write_trajectory(const std::string& path, const equations::Trajectory& traj,
                             bool truncated = false) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const std::string data = encode_trajectory(traj, truncated);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline TrajectoryFile read_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return decode_trajectory(buf.str());
}

// ---------------------------------------------------------------------------
// Field snapshot CSV

inline std::string field_to_csv(const PeriodicField& f) {
    std::string out = "k,re,im\n";
    for (int k = f.grid().min_freq(); k <= f.grid().max_freq(); ++k) {
        out += std::to_string(k) + "," + report::format_double(f.at(k).real()) + "," +
               report::format_double(f.at(k).imag()) + "\n";
    }
    return out;
}

inline PeriodicField field_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "k,re,im")
        throw std::runtime_error("field CSV: missing `k,re,im` header");
    std::vector<std::pair<int, cplx>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error("field CSV: malformed row: " + line);
        rows.emplace_back(std::stoi(line.substr(0, c1)),
                          cplx(std::stod(line.substr(c1 + 1, c2 - c1 - 1)),
                               std::stod(line.substr(c2 + 1))));
    }
    if (rows.empty()) throw std::runtime_error("field CSV: no rows");
    const int n = static_cast<int>(rows.size());
    const Grid grid(n);
    std::vector<cplx> c(static_cast<std::size_t>(n));
    int expect = grid.min_freq();
    for (const auto& [k, z] : rows) {
        if (k != expect++) throw std::runtime_error("field CSV: frequencies must ascend from -N/2");
        c[static_cast<std::size_t>(k - grid.min_freq())] = z;
    }
    // flag as real when the coefficients carry the symmetry
    double scale = 1e-300, worst = 0.0;
    for (const cplx& z : c) scale = std::max(scale, std::abs(z));
    for (int k = 1; k <= grid.max_freq(); ++k)
        worst = std::max(worst, std::abs(c[static_cast<std::size_t>(-k - grid.min_freq())] -
                                         std::conj(c[static_cast<std::size_t>(k - grid.min_freq())])));
    worst = std::max(worst, std::abs(c[static_cast<std::size_t>(-grid.min_freq())].imag()));
    worst = std::max(worst, std::abs(c[0].imag()));
    const bool is_real = worst <= 1e-13 * scale;
    return PeriodicField(grid, std::move(c), is_real);
}

inline void write_field_csv(const std::string& path, const PeriodicField& f) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << field_to_csv(f);
}

inline PeriodicField read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return field_from_csv(buf.str());
}

}  // namespace mbo::io
