// rvmtool: simulation and coarse-graining analysis driver.
//
//   rvmtool print-config  [--config FILE] [--set key=value]...
//   rvmtool simulate      [--config FILE] [--set key=value]...
//   rvmtool coarse-grain  --input SNAP --eps E --delta D --output SNAP
//   rvmtool commutators   [--config FILE] --input SNAP|DIR [--output CSV]
//   rvmtool scaling       [--config FILE]
//   rvmtool budget        [--config FILE] --dir DIR
//   rvmtool synth         [--config FILE] [--kind K] [--a A] [--amplitude X] --output SNAP
//
// Outputs go to output.dir unless an explicit path is given. Every file is
// written to a temporary name and renamed into place.

#include "rvm/rvm.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;

    rvm::RunConfig load() const
    {
        rvm::RunConfig cfg = config_path.empty() ? rvm::RunConfig{} : rvm::load_config(config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
            rvm::set_config_value(cfg, rvm::detail::trim(kv.substr(0, eq)), rvm::detail::trim(kv.substr(eq + 1)));
        }
        (void)cfg.grid();
        return cfg;
    }
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--set", c.overrides, "override one configuration key (key=value)");
}

json fit_json(const rvm::LogLogFit& f)
{
    json j;
    j["slope"] = std::isfinite(f.slope) ? json(f.slope) : json(nullptr);
    j["ci95"] = std::isfinite(f.ci_halfwidth) ? json(f.ci_halfwidth) : json(nullptr);
    j["r_squared"] = std::isfinite(f.r_squared) ? json(f.r_squared) : json(nullptr);
    j["points"] = f.points;
    j["decades"] = f.decades;
    j["flagged"] = f.flagged;
    if (!f.note.empty())
        j["note"] = f.note;
    return j;
}

std::string scaling_csv(const std::vector<rvm::CommutatorReport>& rows)
{
    std::string out(rvm::scaling_csv_header);
    out += '\n';
    for (const auto& r : rows)
        out += rvm::csv_line({r.eps, r.delta, r.fs_norm, r.te_norm, r.tb1_norm, r.tb2_norm, r.tb3_norm,
                              r.lorentz_norm});
    return out;
}

rvm::NormConfig norms_of(const rvm::RunConfig& c)
{
    rvm::NormConfig n;
    n.p = c.p;
    n.r = c.r;
    return n;
}

int cmd_print_config(const Common& c)
{
    std::cout << rvm::config_to_text(c.load());
    return 0;
}

int cmd_simulate(const Common& c)
{
    const auto cfg = c.load();
    std::cerr << "# effective configuration\n" << rvm::config_to_text(cfg);
    const auto grid = cfg.grid();
    const auto solver = cfg.solver();
    std::cerr << "# cfl " << rvm::cfl_number(grid, solver) << "\n";
    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);

    rvm::RVMState state = rvm::initialize(cfg.preset, grid);
    const double pscale = rvm::momentum_scale(state);
    std::vector<rvm::ConservationSample> series{rvm::sample_conservation(state)};
    std::size_t index = 0;
    rvm::write_snapshot(dir / rvm::snapshot_name(index++), state);
    for (std::size_t n = 1; n <= solver.n_steps; ++n) {
        state = rvm::step(state, solver);
        series.push_back(rvm::sample_conservation(state));
        if (n % cfg.stride == 0)
            rvm::write_snapshot(dir / rvm::snapshot_name(index++), state);
    }
    rvm::write_file_atomic(dir / "budget.csv", rvm::budget_csv(series));
    const auto drifts = rvm::conservation_series(series, pscale).drifts;
    json summary;
    summary["steps"] = solver.n_steps;
    summary["dt"] = solver.dt;
    summary["snapshots"] = index;
    summary["drift"] = {{"mass", drifts.mass}, {"l2", drifts.l2},         {"entropy_sq", drifts.entropy_sq},
                        {"total", drifts.total}, {"momentum", drifts.momentum}};
    summary["gauss_residual"] = rvm::gauss_residual(state);
    rvm::write_file_atomic(dir / "simulate.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_coarse_grain(const std::string& input, double eps, double delta, const std::string& output)
{
    const auto s = rvm::read_snapshot(input);
    const auto kx = rvm::make_x_kernel(s.grid(), eps);
    const auto kxi = rvm::make_xi_kernel(s.grid(), delta);
    rvm::RVMState out(s.t, rvm::mollify_xi(rvm::mollify_x(s.f, kx), kxi), rvm::mollify_em(s.em, kx));
    rvm::write_snapshot(output, out);
    return 0;
}

int cmd_commutators(const Common& c, const std::string& input, std::string output)
{
    const auto cfg = c.load();
    rvm::Trajectory traj;
    if (fs::is_directory(input))
        traj = rvm::read_trajectory(input);
    else
        traj.snapshots.push_back(rvm::read_snapshot(input));
    const auto& g = traj.snapshots.front().grid();
    rvm::RunConfig scales = cfg;
    scales.nx = g.nx;
    scales.lx = g.lx;
    scales.nxi = g.nxi;
    scales.xi_max = g.xi_max;
    std::vector<rvm::CommutatorReport> rows;
    for (double e : scales.eps_values())
        for (double d : scales.delta_values())
            rows.push_back(rvm::commutator_report(traj, e, d, norms_of(cfg)));
    if (output.empty())
        output = (fs::path(cfg.output_dir) / "scaling.csv").string();
    rvm::write_file_atomic(output, scaling_csv(rows));
    return 0;
}

int cmd_scaling(const Common& c)
{
    const auto cfg = c.load();
    const auto grid = cfg.grid();
    const auto ens = rvm::onsager_ensemble(cfg.alpha, cfg.beta, grid, cfg.seed, cfg.synth_kind);
    const auto rep = rvm::scaling_sweep(ens.state, cfg.eps_values(), cfg.delta_values(), norms_of(cfg));
    const fs::path dir = cfg.output_dir;
    rvm::write_file_atomic(dir / "scaling.csv", scaling_csv(rep.rows));

    json j;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["condition"] = ens.condition;
    j["predicted"] = {{"fs_delta_slope", cfg.alpha + 1.0},
                      {"fs_eps_slope", cfg.alpha - 1.0},
                      {"te_eps_slope", cfg.alpha + cfg.beta}};
    auto rows = json::array();
    for (std::size_t i = 0; i < rep.fs_delta_slopes.size(); ++i)
        rows.push_back({{"eps", rep.rows[i * cfg.delta_values().size()].eps},
                        {"fs_delta", fit_json(rep.fs_delta_slopes[i])}});
    j["at_fixed_eps"] = rows;
    rows = json::array();
    for (std::size_t k = 0; k < rep.fs_eps_slopes.size(); ++k)
        rows.push_back({{"delta", rep.rows[k].delta},
                        {"fs_eps", fit_json(rep.fs_eps_slopes[k])},
                        {"te_eps", fit_json(rep.te_eps_slopes[k])}});
    j["at_fixed_delta"] = rows;
    rvm::write_file_atomic(dir / "slopes.json", j.dump(2) + "\n");
    return 0;
}

int cmd_budget(const Common& c, const std::string& dir_in)
{
    const auto cfg = c.load();
    const auto traj = rvm::read_trajectory(dir_in);
    const auto report = rvm::conservation_report(traj, {rvm::entropy_square()});
    const fs::path dir = cfg.output_dir;
    rvm::write_file_atomic(dir / "budget.csv", rvm::budget_csv(report.samples));

    json j;
    j["snapshots"] = traj.snapshots.size();
    const auto& d = report.drifts;
    j["drift"] = {{"mass", d.mass},       {"l1", d.l1},         {"l2", d.l2},
                  {"linf", d.linf},       {"entropy_sq", d.entropy_sq}, {"kinetic", d.kinetic},
                  {"total", d.total},     {"momentum", d.momentum}};
    j["xi_boundary_max"] = report.xi_boundary_max;
    if (traj.snapshots.size() >= 3) {
        const auto sweep = rvm::defect_sweep(traj, rvm::entropy_square(), cfg.alpha, cfg.beta, cfg.eps_values());
        std::string csv = "eps,delta,residual,bound\n";
        for (const auto& r : sweep.rows)
            csv += rvm::csv_line({r.eps, r.delta, r.entropy_residual, r.bound_prediction});
        rvm::write_file_atomic(dir / "defect.csv", csv);
        j["defect"] = {{"c_star", sweep.c_star},
                       {"decay", fit_json(sweep.decay)},
                       {"predicted_regime_i", rvm::defect_exponent(cfg.alpha, cfg.beta)}};
        j["local_energy_residual_l2"] = rvm::local_energy_residual(traj).l2;
    }
    rvm::write_file_atomic(dir / "summary.json", j.dump(2) + "\n");
    return 0;
}

int cmd_synth(const Common& c, const std::string& kind, double a, double amplitude, const std::string& axes,
              bool ensemble, const std::string& output)
{
    const auto cfg = c.load();
    const auto grid = cfg.grid();
    rvm::RVMState state;
    if (ensemble) {
        state = rvm::onsager_ensemble(cfg.alpha, cfg.beta, grid, cfg.seed, cfg.synth_kind).state;
    } else {
        rvm::SynthSpec spec;
        spec.kind = rvm::parse_synth_kind(kind);
        spec.a = a;
        spec.seed = cfg.seed;
        spec.amplitude = amplitude;
        if (axes == "x")
            spec.axes = rvm::SynthAxes::x;
        else if (axes == "xi")
            spec.axes = rvm::SynthAxes::xi;
        else if (axes == "both")
            spec.axes = rvm::SynthAxes::both;
        else
            throw std::invalid_argument("--axes must be x, xi or both");
        state = rvm::RVMState(0.0, rvm::generate(spec, grid), rvm::EMField(grid.nx));
    }
    rvm::write_snapshot(output.empty() ? fs::path(cfg.output_dir) / "synth.rvm" : fs::path(output), state);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Relativistic Vlasov-Maxwell simulation and coarse-graining diagnostics"};
    app.require_subcommand(1);

    Common common;

    auto* print = app.add_subcommand("print-config", "print the effective configuration (all keys)");
    add_common(print, common);

    auto* sim = app.add_subcommand("simulate", "run the solver; write snapshots and budget.csv");
    add_common(sim, common);

    std::string cg_in, cg_out;
    double cg_eps = 0.0, cg_delta = 0.0;
    auto* cg = app.add_subcommand("coarse-grain", "write the mollified snapshot f^{eps,delta}");
    cg->add_option("--input", cg_in)->required()->check(CLI::ExistingFile);
    cg->add_option("--eps", cg_eps)->required();
    cg->add_option("--delta", cg_delta)->required();
    cg->add_option("--output", cg_out)->required();

    std::string com_in, com_out;
    auto* com = app.add_subcommand("commutators", "commutator norms over the configured scale lists");
    add_common(com, common);
    com->add_option("--input", com_in, "snapshot file or directory of snap_*.rvm")->required();
    com->add_option("--output", com_out, "CSV path (default output.dir/scaling.csv)");

    auto* scal = app.add_subcommand("scaling", "commutator sweep on a synthetic ensemble; scaling.csv + slopes.json");
    add_common(scal, common);

    std::string bud_dir;
    auto* bud = app.add_subcommand("budget", "conservation and entropy-defect reports for a snapshot directory");
    add_common(bud, common);
    bud->add_option("--dir", bud_dir)->required()->check(CLI::ExistingDirectory);

    std::string syn_kind = "weierstrass", syn_axes = "both", syn_out;
    double syn_a = 0.5, syn_amp = 1.0;
    bool syn_ensemble = false;
    auto* syn = app.add_subcommand("synth", "write a synthetic field as a snapshot");
    add_common(syn, common);
    syn->add_option("--kind", syn_kind, "weierstrass | random_fourier | step | gaussian_bump");
    syn->add_option("--a", syn_a, "target exponent");
    syn->add_option("--amplitude", syn_amp);
    syn->add_option("--axes", syn_axes, "x | xi | both");
    syn->add_flag("--ensemble", syn_ensemble, "nonnegative f and fields from analysis.alpha / analysis.beta");
    syn->add_option("--output", syn_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*print)
            return cmd_print_config(common);
        if (*sim)
            return cmd_simulate(common);
        if (*cg)
            return cmd_coarse_grain(cg_in, cg_eps, cg_delta, cg_out);
        if (*com)
            return cmd_commutators(common, com_in, com_out);
        if (*scal)
            return cmd_scaling(common);
        if (*bud)
            return cmd_budget(common, bud_dir);
        if (*syn)
            return cmd_synth(common, syn_kind, syn_a, syn_amp, syn_axes, syn_ensemble, syn_out);
    } catch (const std::exception& e) {
        std::cerr << "rvmtool: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
