#include "rvm/io.hpp"
#include "rvm/mollify.hpp"
#include "rvm/synth.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numbers>
#include <sstream>

using namespace rvm;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir()
        : path_(fs::temp_directory_path() /
                ("rvm_cli_" + std::to_string(::getpid()) + "_" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name()))
    {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

RVMState sample_state(std::size_t dims)
{
    const PhaseGrid g = dims == 1 ? PhaseGrid{6, 1.5, {5}, 2.0} : PhaseGrid{4, 3.0, {3, 5}, 1.25};
    RVMState s(0.125, DistField(g), EMField(g.nx));
    double v = -1.0;
    for (double& x : s.f.values) {
        v += 0.3712;
        x = v * 1e-3 + std::sqrt(std::abs(v));
    }
    s.f.values[1] = std::numeric_limits<double>::denorm_min();
    s.f.values[2] = -0.0;
    for (std::size_t i = 0; i < g.nx; ++i) {
        s.em.ex[i] = std::sin(1.0 + i);
        if (dims == 2) {
            s.em.ey[i] = 1.0 / (1.0 + i);
            s.em.bz[i] = 1e300 * i;
        }
    }
    return s;
}

int run_tool(const std::string& args, const fs::path& log = {})
{
    std::string cmd = std::string("\"") + RVMTOOL_PATH + "\" " + args;
    cmd += log.empty() ? " >/dev/null 2>&1" : " >\"" + log.string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::size_t count_lines(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

} // namespace

TEST(Snapshot, RoundTripIsBitExact)
{
    for (std::size_t dims : {1u, 2u}) {
        const auto s = sample_state(dims);
        const auto bytes = encode_snapshot(s);
        const auto back = decode_snapshot(bytes);
        EXPECT_EQ(back, s);
        EXPECT_EQ(encode_snapshot(back), bytes);
        EXPECT_TRUE(std::signbit(back.f.values[2]));
    }
}

TEST(Snapshot, HeaderLayout)
{
    const auto s = sample_state(2);
    const auto bytes = encode_snapshot(s);
    EXPECT_EQ(bytes.substr(0, 4), "RVM1");
    auto u32 = [&](std::size_t off) {
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i)
            v = (v << 8) | static_cast<unsigned char>(bytes[off + i]);
        return v;
    };
    auto u64 = [&](std::size_t off) {
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i)
            v = (v << 8) | static_cast<unsigned char>(bytes[off + i]);
        return v;
    };
    EXPECT_EQ(u32(4), 1u);  // version
    EXPECT_EQ(u32(8), 1u);  // spatial dims
    EXPECT_EQ(u32(12), 2u); // momentum dims
    EXPECT_EQ(u64(16), 4u);
    EXPECT_EQ(u64(24), 3u);
    EXPECT_EQ(u64(32), 5u);
    EXPECT_EQ(std::bit_cast<double>(u64(40)), 0.125);
    EXPECT_EQ(std::bit_cast<double>(u64(48)), 3.0);
    EXPECT_EQ(std::bit_cast<double>(u64(56)), 1.25);
    const std::size_t nf = 4 * 3 * 5;
    EXPECT_EQ(std::bit_cast<double>(u64(64)), s.f.values[0]);
    EXPECT_EQ(u32(64 + 8 * nf), 0b111u);
    EXPECT_EQ(bytes.size(), 64 + 8 * nf + 4 + 3 * 8 * 4);

    const auto one = encode_snapshot(sample_state(1));
    EXPECT_EQ(one.size(), 16 + 8 + 8 + 24 + 8 * 30 + 4 + 3 * 8 * 6);
}

TEST(Snapshot, RejectsCorruptFiles)
{
    const auto bytes = encode_snapshot(sample_state(1));
    auto bad = bytes;
    bad[0] = 'X';
    EXPECT_THROW(decode_snapshot(bad), std::runtime_error);
    EXPECT_THROW(decode_snapshot(bytes.substr(0, bytes.size() - 1)), std::runtime_error);
    EXPECT_THROW(decode_snapshot(bytes + "z"), std::runtime_error);
    bad = bytes;
    bad[4] = 2;
    EXPECT_THROW(decode_snapshot(bad), std::runtime_error);
    bad = bytes;
    bad[12] = 3;
    EXPECT_THROW(decode_snapshot(bad), std::runtime_error);
}

TEST(Snapshot, FilesAndTrajectories)
{
    TempDir tmp;
    EXPECT_EQ(snapshot_name(7), "snap_000007.rvm");
    EXPECT_EQ(snapshot_name(1234567), "snap_1234567.rvm");
    auto s = sample_state(1);
    for (std::size_t i = 0; i < 3; ++i) {
        s.t = 0.5 * static_cast<double>(i);
        write_snapshot(tmp.path() / snapshot_name(i), s);
    }
    write_file_atomic(tmp.path() / "notes.txt", "ignored");
    const auto traj = read_trajectory(tmp.path());
    ASSERT_EQ(traj.snapshots.size(), 3u);
    EXPECT_EQ(traj.snapshots[2].t, 1.0);
    EXPECT_EQ(read_snapshot(tmp.path() / snapshot_name(1)).t, 0.5);
    for (const auto& e : fs::directory_iterator(tmp.path()))
        EXPECT_EQ(e.path().filename().string().find(".tmp"), std::string::npos);
    EXPECT_THROW(read_trajectory(tmp.path() / "missing"), std::exception);
}

TEST(Text, DoublesRoundTrip)
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
        const auto s = format_double(v);
        EXPECT_EQ(std::stod(s), v) << s;
    }
    EXPECT_EQ(csv_line({1.0, 0.5, -2.0}), "1,0.5,-2\n");
}

TEST(Text, CsvSchemas)
{
    EXPECT_EQ(budget_csv_header, "t,mass,l1,l2,linf,entropy_sq,kinetic,field,total,px,py");
    EXPECT_EQ(scaling_csv_header, "eps,delta,fs_norm,te_norm,tb1_norm,tb2_norm,tb3_norm,lorentz_norm");
    ConservationSample c;
    c.t = 0.25;
    c.mass = 2.0;
    const auto csv = budget_csv({c, c});
    EXPECT_EQ(count_lines(csv), 3u);
    EXPECT_EQ(csv.substr(csv.find('\n') + 1, 10), "0.25,2,0,0");
}

TEST(Config, DefaultsAreComplete)
{
    const auto text = config_to_text(RunConfig{});
    for (const char* key : {"grid.nx", "grid.lx", "grid.nxi", "grid.xi_max", "solver.dt", "solver.steps",
                            "solver.interp", "solver.preset", "analysis.alpha", "analysis.beta", "analysis.eps_list",
                            "analysis.delta_list", "analysis.p", "analysis.r", "output.dir", "seed"})
        EXPECT_NE(text.find(std::string(key) + " = "), std::string::npos) << key;
    EXPECT_EQ(config_to_text(parse_config(text)), text);
    EXPECT_EQ(config_to_text(parse_config("")), text);
}

TEST(Config, ParsesValues)
{
    const auto c = parse_config("# comment\n"
                                "grid.nx = 64\n"
                                "grid.nxi = 32, 48   # trailing comment\n"
                                "grid.xi_max=6\n"
                                "solver.preset = weibel_anisotropy\n"
                                "solver.interp = cubic_spline\n"
                                "analysis.eps_list = 0.1, 0.2\n"
                                "output.dir = out dir\n"
                                "synth.kind = random_fourier\n"
                                "seed = 18446744073709551615\n");
    EXPECT_EQ(c.nx, 64u);
    EXPECT_EQ(c.nxi, (std::vector<std::size_t>{32, 48}));
    EXPECT_EQ(c.xi_max, 6.0);
    EXPECT_EQ(c.preset, "weibel_anisotropy");
    EXPECT_EQ(c.interp, Interpolation::cubic_spline);
    EXPECT_EQ(c.eps_list, (std::vector<double>{0.1, 0.2}));
    EXPECT_EQ(c.output_dir, "out dir");
    EXPECT_EQ(c.synth_kind, SynthKind::random_fourier);
    EXPECT_EQ(c.seed, std::numeric_limits<std::uint64_t>::max());
    EXPECT_EQ(c.grid().xi_dims(), 2u);
    EXPECT_EQ(c.eps_values(), c.eps_list);
    EXPECT_EQ(c.delta_values().size(), 6u);
    EXPECT_NEAR(c.delta_values().front(), 4.0 * 12.0 / 32.0, 1e-15);
}

TEST(Config, RejectsBadInput)
{
    EXPECT_THROW(parse_config("grid.nz = 3\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("grid.nx = 3\ngrid.nx = 4\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("grid.nx 3\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("grid.nx = -3\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("grid.lx = abc\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("solver.preset = plasma\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("grid.nxi = 4,4,4\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("output.stride = 0\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("synth.kind = step\n"), std::invalid_argument);
}

TEST(Tool, SimulateWithoutStepsWritesInitialState)
{
    TempDir tmp;
    const auto out = tmp.path() / "run";
    ASSERT_EQ(run_tool("simulate --set grid.nx=16 --set grid.nxi=16 --set solver.steps=0 --set output.dir=" +
                       out.string()),
              0);
    const auto traj = read_trajectory(out);
    ASSERT_EQ(traj.snapshots.size(), 1u);
    EXPECT_EQ(traj.snapshots[0], initialize(Preset::landau_perturbation, PhaseGrid{16, 4.0 * std::numbers::pi, {16}, 8.0}));
    const auto csv = read_file(out / "budget.csv");
    EXPECT_EQ(count_lines(csv), 2u);
    EXPECT_TRUE(csv.starts_with(std::string(budget_csv_header) + "\n"));
    const auto summary = read_file(out / "simulate.json");
    EXPECT_NE(summary.find("\"mass\": 0.0"), std::string::npos);
}

TEST(Tool, SynthRoundTrip)
{
    TempDir tmp;
    const auto file = tmp.path() / "w.rvm";
    ASSERT_EQ(run_tool("synth --kind weierstrass --a 0.4 --amplitude 2 --set grid.nx=32 --set grid.nxi=16 --set seed=9 "
                       "--output " + file.string()),
              0);
    const PhaseGrid g{32, 4.0 * std::numbers::pi, {16}, 8.0};
    const auto expect = generate(SynthSpec{SynthKind::weierstrass, 0.4, 9, 2.0, SynthAxes::both, std::nullopt}, g);
    EXPECT_EQ(read_snapshot(file).f, expect);
}

TEST(Tool, ReportsErrorsWithNonzeroExit)
{
    TempDir tmp;
    const auto log = tmp.path() / "log.txt";
    EXPECT_NE(run_tool("print-config --set grid.nz=4", log), 0);
    EXPECT_NE(read_file(log).find("unknown key"), std::string::npos);
    EXPECT_NE(run_tool("", log), 0);
    EXPECT_NE(run_tool("coarse-grain --input " + (tmp.path() / "nope.rvm").string() + " --eps 1 --delta 1 --output x",
                       log),
              0);
    EXPECT_NE(run_tool("budget --dir " + tmp.path().string(), log), 0);
    EXPECT_NE(read_file(log).find("rvmtool"), std::string::npos);
}

TEST(Tool, PrintConfigEchoesOverrides)
{
    TempDir tmp;
    const auto cfg = tmp.path() / "run.cfg";
    write_file_atomic(cfg, "grid.nx = 128\nanalysis.alpha = 0.3\n");
    const auto log = tmp.path() / "out.txt";
    ASSERT_EQ(run_tool("print-config --config " + cfg.string() + " --set analysis.beta=0.7", log), 0);
    const auto text = read_file(log);
    auto expect = RunConfig{};
    expect.nx = 128;
    expect.alpha = 0.3;
    expect.beta = 0.7;
    EXPECT_EQ(text, config_to_text(expect));
}

TEST(Tool, CoarseGrainMatchesLibrary)
{
    TempDir tmp;
    const auto in = tmp.path() / "in.rvm";
    const auto out = tmp.path() / "out.rvm";
    const PhaseGrid g{32, 1.0, {32}, 4.0};
    RVMState s(0.0, generate(SynthSpec{SynthKind::random_fourier, 0.5, 3, 1.0, SynthAxes::both, std::nullopt}, g),
               EMField(g.nx));
    s.em.ex = generate_line(SynthSpec{SynthKind::weierstrass, 0.5, 3, 1.0, SynthAxes::x, std::nullopt}, g.nx, g.lx, 10);
    write_snapshot(in, s);
    ASSERT_EQ(run_tool("coarse-grain --input " + in.string() + " --eps 0.125 --delta 1 --output " + out.string()), 0);
    const auto got = read_snapshot(out);
    const auto kx = make_x_kernel(g, 0.125);
    EXPECT_EQ(got.f, mollify_xi(mollify_x(s.f, kx), make_xi_kernel(g, 1.0)));
    EXPECT_EQ(got.em.ex, mollify_em(s.em, kx).ex);
}
