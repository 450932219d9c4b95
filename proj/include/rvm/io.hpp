#ifndef RVM_IO_HPP
#define RVM_IO_HPP

#include "rvm/phase_grid.hpp"
#include "rvm/solver.hpp"
#include "rvm/synth.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

// Snapshot files, run configuration, and text output.
//
// Snapshot layout (all little-endian):
//   "RVM1"            4 bytes
//   version           u32 = 1
//   dx_dims           u32 = 1
//   dxi_dims          u32 (1 or 2)
//   Nx                u64
//   N_xi              u64 per momentum dimension
//   t, Lx, Xi_max     f64
//   f                 f64[Nx * prod N_xi], x-major then xi_1 then xi_2
//   presence          u32 bitmask (bit 0 Ex, bit 1 Ey, bit 2 Bz)
//   Ex, Ey, Bz        f64[Nx] each; absent components are written as zeros

namespace rvm {

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

/// Writes `bytes` to a temporary sibling and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view bytes)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Snapshots
// ---------------------------------------------------------------------------

inline constexpr std::array<char, 4> snapshot_magic{'R', 'V', 'M', '1'};
inline constexpr std::uint32_t snapshot_version = 1;

namespace detail {

template <class T>
void put_le(std::string& out, T value)
{
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i)
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
public:
    explicit Reader(std::string_view data)
        : data_(data)
    {}

    template <class T>
    T get()
    {
        using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
        if (pos_ + sizeof(U) > data_.size())
            throw std::runtime_error("snapshot truncated");
        U bits = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i)
            bits |= static_cast<U>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += sizeof(U);
        return std::bit_cast<T>(bits);
    }

    std::string_view take(std::size_t n)
    {
        if (pos_ + n > data_.size())
            throw std::runtime_error("snapshot truncated");
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    bool done() const { return pos_ == data_.size(); }

private:
    std::string_view data_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline std::string encode_snapshot(const RVMState& s)
{
    const auto& g = s.grid();
    std::string out;
    out.reserve(64 + 8 * (g.size() + 3 * g.nx));
    out.append(snapshot_magic.data(), snapshot_magic.size());
    detail::put_le(out, snapshot_version);
    detail::put_le(out, std::uint32_t{1});
    detail::put_le(out, static_cast<std::uint32_t>(g.xi_dims()));
    detail::put_le(out, static_cast<std::uint64_t>(g.nx));
    for (auto n : g.nxi)
        detail::put_le(out, static_cast<std::uint64_t>(n));
    detail::put_le(out, s.t);
    detail::put_le(out, g.lx);
    detail::put_le(out, g.xi_max);
    for (double v : s.f.values)
        detail::put_le(out, v);
    const std::uint32_t presence = g.xi_dims() == 2 ? 0b111u : 0b001u;
    detail::put_le(out, presence);
    for (const auto* comp : {&s.em.ex, &s.em.ey, &s.em.bz})
        for (double v : *comp)
            detail::put_le(out, v);
    return out;
}

inline RVMState decode_snapshot(std::string_view bytes)
{
    detail::Reader r(bytes);
    const auto magic = r.take(4);
    if (std::memcmp(magic.data(), snapshot_magic.data(), 4) != 0)
        throw std::runtime_error("not a snapshot file (bad magic)");
    if (r.get<std::uint32_t>() != snapshot_version)
        throw std::runtime_error("unsupported snapshot version");
    if (r.get<std::uint32_t>() != 1)
        throw std::runtime_error("snapshot: only one spatial dimension is supported");
    const auto dxi = r.get<std::uint32_t>();
    if (dxi != 1 && dxi != 2)
        throw std::runtime_error("snapshot: momentum dimension must be 1 or 2");
    const auto nx = r.get<std::uint64_t>();
    std::vector<std::size_t> nxi;
    for (std::uint32_t a = 0; a < dxi; ++a)
        nxi.push_back(static_cast<std::size_t>(r.get<std::uint64_t>()));
    const double t = r.get<double>();
    const double lx = r.get<double>();
    const double xi_max = r.get<double>();
    PhaseGrid g(static_cast<std::size_t>(nx), lx, nxi, xi_max);
    DistField f(g);
    for (double& v : f.values)
        v = r.get<double>();
    const auto presence = r.get<std::uint32_t>();
    if (presence & ~0b111u)
        throw std::runtime_error("snapshot: invalid presence mask");
    EMField em(g.nx);
    for (auto* comp : {&em.ex, &em.ey, &em.bz})
        for (double& v : *comp)
            v = r.get<double>();
    if (!r.done())
        throw std::runtime_error("snapshot: trailing bytes");
    return RVMState(t, std::move(f), std::move(em));
}

inline void write_snapshot(const std::filesystem::path& path, const RVMState& s)
{
    write_file_atomic(path, encode_snapshot(s));
}

inline RVMState read_snapshot(const std::filesystem::path& path) { return decode_snapshot(read_file(path)); }

/// Snapshots named snap_*.rvm in a directory, in name order.
inline Trajectory read_trajectory(const std::filesystem::path& dir)
{
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.starts_with("snap_") && name.ends_with(".rvm"))
            files.push_back(e.path());
    }
    if (files.empty())
        throw std::runtime_error("no snap_*.rvm files in " + dir.string());
    std::sort(files.begin(), files.end());
    Trajectory traj;
    for (const auto& p : files)
        traj.snapshots.push_back(read_snapshot(p));
    for (std::size_t i = 1; i < traj.snapshots.size(); ++i)
        if (!(traj.snapshots[i].t > traj.snapshots[i - 1].t))
            throw std::runtime_error("snapshot times in " + dir.string() + " are not increasing");
    return traj;
}

inline std::string snapshot_name(std::size_t index)
{
    std::string digits = std::to_string(index);
    return "snap_" + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits + ".rvm";
}

// ---------------------------------------------------------------------------
// Text formatting
// ---------------------------------------------------------------------------

/// Shortest representation that round-trips.
inline std::string format_double(double v)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline std::string csv_line(const std::vector<double>& values)
{
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            line += ',';
        line += format_double(values[i]);
    }
    line += '\n';
    return line;
}

inline constexpr std::string_view budget_csv_header = "t,mass,l1,l2,linf,entropy_sq,kinetic,field,total,px,py";
inline constexpr std::string_view scaling_csv_header =
    "eps,delta,fs_norm,te_norm,tb1_norm,tb2_norm,tb3_norm,lorentz_norm";

inline std::string budget_csv(const std::vector<ConservationSample>& rows)
{
    std::string out(budget_csv_header);
    out += '\n';
    for (const auto& s : rows)
        out += csv_line({s.t, s.mass, s.l1, s.l2, s.linf, s.entropy_sq, s.kinetic, s.field, s.total, s.px, s.py});
    return out;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
    std::size_t nx = 512;
    double lx = 4.0 * std::numbers::pi;
    std::vector<std::size_t> nxi{512};
    double xi_max = 8.0;
    double dt = 0.0; ///< 0 selects 0.1 dx
    std::size_t steps = 100;
    Interpolation interp = Interpolation::spectral;
    std::string preset = "landau_perturbation";
    double alpha = 0.5;
    double beta = 0.5;
    std::vector<double> eps_list;   ///< empty: 6 log-spaced scales over [4 dx, 40 dx]
    std::vector<double> delta_list; ///< empty: 6 log-spaced scales over [4 dxi, 40 dxi]
    double p = 2.0;
    double r = 2.0;
    std::string output_dir = "rvm_out";
    std::size_t stride = 10;
    std::uint64_t seed = 1;
    /// Rough kind behind the synthetic ensemble (scaling, synth --ensemble).
    SynthKind synth_kind = SynthKind::weierstrass;

    PhaseGrid grid() const { return PhaseGrid(nx, lx, nxi, xi_max); }

    SolverConfig solver() const
    {
        auto cfg = SolverConfig::defaults_for(grid());
        if (dt > 0.0)
            cfg.dt = dt;
        cfg.n_steps = steps;
        cfg.interpolation = interp;
        cfg.free_streaming = preset == "free_streaming_test";
        return cfg;
    }

    static std::vector<double> log_list(double lo, double hi, std::size_t n)
    {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
        return out;
    }

    std::vector<double> eps_values() const
    {
        if (!eps_list.empty())
            return eps_list;
        const double dx = lx / static_cast<double>(nx);
        return log_list(4.0 * dx, std::min(40.0 * dx, 0.5 * lx), 6);
    }

    std::vector<double> delta_values() const
    {
        if (!delta_list.empty())
            return delta_list;
        const double h = 2.0 * xi_max / static_cast<double>(nxi.front());
        return log_list(4.0 * h, std::min(40.0 * h, xi_max), 6);
    }
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out))
        throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
    return out;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v)
{
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
    return out;
}

template <class F>
auto parse_list(const std::string& v, F item)
{
    std::vector<decltype(item(std::string{}))> out;
    if (trim(v).empty())
        return out;
    std::string_view rest = v;
    while (true) {
        const auto comma = rest.find(',');
        out.push_back(item(trim(rest.substr(0, comma))));
        if (comma == std::string_view::npos)
            break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ',';
        if constexpr (std::is_floating_point_v<T>)
            out += format_double(v[i]);
        else
            out += std::to_string(v[i]);
    }
    return out;
}

} // namespace detail

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& v)
{
    using namespace detail;
    if (key == "grid.nx")
        c.nx = parse_uint(key, v);
    else if (key == "grid.lx")
        c.lx = parse_double(key, v);
    else if (key == "grid.nxi") {
        c.nxi = parse_list(v, [&](const std::string& s) { return static_cast<std::size_t>(parse_uint(key, s)); });
        if (c.nxi.empty() || c.nxi.size() > 2)
            throw std::invalid_argument("config: grid.nxi needs one or two entries");
    } else if (key == "grid.xi_max")
        c.xi_max = parse_double(key, v);
    else if (key == "solver.dt")
        c.dt = parse_double(key, v);
    else if (key == "solver.steps")
        c.steps = parse_uint(key, v);
    else if (key == "solver.interp")
        c.interp = parse_interpolation(v);
    else if (key == "solver.preset") {
        (void)parse_preset(v);
        c.preset = v;
    } else if (key == "analysis.alpha")
        c.alpha = parse_double(key, v);
    else if (key == "analysis.beta")
        c.beta = parse_double(key, v);
    else if (key == "analysis.eps_list")
        c.eps_list = parse_list(v, [&](const std::string& s) { return parse_double(key, s); });
    else if (key == "analysis.delta_list")
        c.delta_list = parse_list(v, [&](const std::string& s) { return parse_double(key, s); });
    else if (key == "analysis.p")
        c.p = parse_double(key, v);
    else if (key == "analysis.r")
        c.r = parse_double(key, v);
    else if (key == "output.dir")
        c.output_dir = v;
    else if (key == "output.stride") {
        c.stride = parse_uint(key, v);
        if (c.stride == 0)
            throw std::invalid_argument("config: output.stride must be positive");
    } else if (key == "synth.kind") {
        c.synth_kind = parse_synth_kind(v);
        if (c.synth_kind != SynthKind::weierstrass && c.synth_kind != SynthKind::random_fourier)
            throw std::invalid_argument("config: synth.kind must be weierstrass or random_fourier");
    } else if (key == "seed")
        c.seed = parse_uint(key, v);
    else
        throw std::invalid_argument("config: unknown key '" + key + "'");
}

/// Parses `key = value` lines; '#' starts a comment. Unknown keys and
/// repeated keys are errors.
inline RunConfig parse_config(std::string_view text)
{
    RunConfig c;
    std::map<std::string, int> seen;
    std::size_t lineno = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto body = detail::trim(line);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const auto key = detail::trim(std::string_view(body).substr(0, eq));
        const auto value = detail::trim(std::string_view(body).substr(eq + 1));
        if (seen[key]++)
            throw std::invalid_argument("config: duplicate key '" + key + "'");
        set_config_value(c, key, value);
    }
    (void)c.grid();
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

/// Every key with its current value, in a form parse_config accepts.
inline std::string config_to_text(const RunConfig& c)
{
    using detail::join;
    std::string s;
    s += "grid.nx = " + std::to_string(c.nx) + "\n";
    s += "grid.lx = " + format_double(c.lx) + "\n";
    s += "grid.nxi = " + join(c.nxi) + "\n";
    s += "grid.xi_max = " + format_double(c.xi_max) + "\n";
    s += "solver.dt = " + format_double(c.dt) + "\n";
    s += "solver.steps = " + std::to_string(c.steps) + "\n";
    s += "solver.interp = " + std::string(to_string(c.interp)) + "\n";
    s += "solver.preset = " + c.preset + "\n";
    s += "analysis.alpha = " + format_double(c.alpha) + "\n";
    s += "analysis.beta = " + format_double(c.beta) + "\n";
    s += "analysis.eps_list = " + join(c.eps_list) + "\n";
    s += "analysis.delta_list = " + join(c.delta_list) + "\n";
    s += "analysis.p = " + format_double(c.p) + "\n";
    s += "analysis.r = " + format_double(c.r) + "\n";
    s += "output.dir = " + c.output_dir + "\n";
    s += "output.stride = " + std::to_string(c.stride) + "\n";
    s += "synth.kind = " + std::string(to_string(c.synth_kind)) + "\n";
    s += "seed = " + std::to_string(c.seed) + "\n";
    return s;
}

} // namespace rvm

#endif
