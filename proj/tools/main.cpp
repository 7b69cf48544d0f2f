#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gpbl/corrector.hpp"
#include "gpbl/csv_io.hpp"
#include "gpbl/harness.hpp"
#include "gpbl/layer.hpp"
#include "gpbl/limit_system.hpp"
#include "gpbl/norms.hpp"
#include "gpbl/trace.hpp"

namespace fs = std::filesystem;
using namespace gpbl;

namespace {

struct CommonFlags {
    std::string config, out, eps_list;
    int order = -1;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "scenario config file (flat key = value)")
        ->required();
    cmd->add_option("--out", f.out, "output directory (overrides config out_dir)");
    cmd->add_option("--eps", f.eps_list, "comma-separated eps list (overrides config)");
    cmd->add_option("--order", f.order, "expansion order m (overrides config)");
    cmd->add_option("--jobs", f.jobs, "worker processes for the eps sweep")
        ->check(CLI::PositiveNumber);
}

ScenarioConfig load_config(const CommonFlags& f) {
    ScenarioConfig cfg = ScenarioConfig::from_file(f.config);
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (!f.eps_list.empty()) {
        std::string text = "eps = " + f.eps_list;
        ScenarioConfig patch = cfg;
        // reuse the config parser for the list syntax
        ScenarioConfig tmp = ScenarioConfig::from_string(text);
        patch.eps = tmp.eps;
        cfg = patch;
    }
    if (f.order >= 0) cfg.order = f.order;
    cfg.validate();
    return cfg;
}

LimitTrajectory solve_limit(const ScenarioConfig& cfg) {
    const Grid g = cfg.make_grid();
    RealField a00 =
        RealField::sampled(g, [&](double z, double) { return 1.0 + cfg.delta * bump(cfg, z); });
    RealField phi00 =
        RealField::sampled(g, [&](double z, double) { return cfg.delta * bump(cfg, z); });
    return solve_phi0(phi00, a00, cfg.T, cfg.T / cfg.hierarchy_intervals());
}

int cmd_limit_solve(const CommonFlags& f) {
    ScenarioConfig cfg = load_config(f);
    LimitTrajectory traj = solve_limit(cfg);
    const int every = std::max(1, traj.steps() / 16);
    export_trajectory(traj, cfg.out_dir + "/limit", every);
    std::cout << "limit-solve: " << traj.steps() << " steps, dt = " << traj.dt
              << ", wrote " << cfg.out_dir << "/limit\n";
    return 0;
}

int cmd_layer_profile(const CommonFlags& f) {
    ScenarioConfig cfg = load_config(f);
    LimitTrajectory traj = solve_limit(cfg);
    const int step = traj.steps() / 2;
    LimitState s = traj.state(step);
    TraceRecord ta = boundary_trace(s.a0, 0);
    TraceRecord tp = boundary_trace(s.phi0, 1);
    LayerInputs in{ta.value(0), tp.value(1)};
    in.validate();
    const Grid zg = layer_grid(compute_C2(in).h0);
    LayerProfile p;
    p.A = profile_A0(in, zg);
    p.Phi = profile_Phi1(in, p.A);
    p.decay_const = decay_constant(p.A);
    p.tail_bound = std::abs(p.A[p.A.size() - 1]);
    fs::create_directories(cfg.out_dir);
    export_profile(cfg.out_dir + "/layer_profile.csv", cfg.out_dir + "/layer_profile.json", p,
                   in);
    std::cout << "layer-profile: t = " << traj.t[step] << ", a0bar = " << in.a0bar
              << ", v0 = " << in.v0 << ", wrote " << cfg.out_dir << "/layer_profile.csv\n";
    return 0;
}

int cmd_wkb_build(const CommonFlags& f) {
    ScenarioConfig cfg = load_config(f);
    WKBExpansion w = build_hierarchy(cfg);
    w.eps = cfg.eps.front();
    fs::create_directories(cfg.out_dir);
    const int ns = w.steps();
    for (int step : {0, (ns - 1) / 2, ns - 1}) {
        Assembled s = assemble(w, step);
        const std::string tag = std::to_string(step);
        write_field_csv(cfg.out_dir + "/wkb_a_" + tag + ".csv", s.a);
        write_field_csv(cfg.out_dir + "/wkb_phi_" + tag + ".csv", s.phi);
    }
    std::cout << "wkb-build: m = " << w.m << ", eps = " << w.eps << ", " << ns
              << " steps, wrote " << cfg.out_dir << "/wkb_{a,phi}_<step>.csv\n";
    return 0;
}

GPTrajectory run_gp(const ScenarioConfig& cfg, WKBExpansion& w, double eps) {
    w.eps = eps;
    Assembled init = assemble(w, 0);
    ComplexField psi0 = to_psi(init.a, init.phi, eps);
    for (int iy = 0; iy < w.grid.ny; ++iy) {
        psi0.at(0, iy) = 1.0;
        psi0.at(w.grid.nz - 1, iy) = 1.0;
    }
    const double dz = w.grid.dz();
    const double dt0 = std::min(0.5 * dz * dz / eps, 0.1 * eps);
    int nsteps = static_cast<int>(std::ceil(cfg.T / dt0 - 1e-9));
    nsteps = ((std::max(nsteps, 4) + 3) / 4) * 4;
    GPOptions opts;
    opts.dt = cfg.T / nsteps;
    opts.save_every = nsteps / 4;
    return gp_solve(psi0, cfg.T, eps, opts);
}

int cmd_gp_solve(const CommonFlags& f) {
    ScenarioConfig cfg = load_config(f);
    WKBExpansion w = build_hierarchy(cfg);
    GPTrajectory traj = run_gp(cfg, w, cfg.eps.front());
    fs::create_directories(cfg.out_dir);
    for (int k = 0; k < traj.steps(); ++k)
        write_field_csv(cfg.out_dir + "/psi_" + std::to_string(k) + ".csv", traj.psi[k]);
    nlohmann::ordered_json j;
    j["eps"] = traj.eps;
    j["dt"] = traj.dt;
    j["t"] = traj.t;
    j["energy_drift"] = traj.energy_drift;
    j["boundary_drift"] = traj.boundary_drift;
    std::ofstream(cfg.out_dir + "/gp_solve.json") << j.dump(2) << '\n';
    std::cout << "gp-solve: eps = " << traj.eps << ", dt = " << traj.dt
              << ", energy drift = " << traj.energy_drift << ", boundary drift = "
              << traj.boundary_drift << ", wrote " << cfg.out_dir << "/psi_<k>.csv\n";
    return 0;
}

int cmd_residual(const CommonFlags& f) {
    ScenarioConfig cfg = load_config(f);
    WKBExpansion w = build_hierarchy(cfg);
    fs::create_directories(cfg.out_dir);
    nlohmann::ordered_json j;
    for (double eps : cfg.eps) {
        w.eps = eps;
        const int step = (w.steps() - 1) / 2;
        ResidualRecord rec = residuals(w, step);
        nlohmann::ordered_json e;
        e["eps"] = eps;
        e["t"] = w.t[step];
        e["gp_l2"] = rec.norm_gp_l2;
        e["Ra_l2"] = rec.norm_Ra_l2;
        e["Rphi_l2"] = rec.norm_Rphi_l2;
        e["identity_gap_sup"] = rec.identity_gap_sup;
        e["stencil_tol"] = rec.stencil_tol;
        j.push_back(e);
        std::cout << "residual: eps = " << eps << ", |GP|_L2 = " << rec.norm_gp_l2
                  << ", identity gap = " << rec.identity_gap_sup << " (tol scale "
                  << rec.stencil_tol << ")\n";
    }
    std::ofstream(cfg.out_dir + "/residual.json") << j.dump(2) << '\n';
    return 0;
}

int cmd_converge(const CommonFlags& f) {
    ScenarioConfig cfg = load_config(f);
    ConvergenceReport rep = run_convergence(cfg);
    for (const auto& [kind, e] : rep.slopes) {
        std::cout << "converge: " << kind << " slope = " << e.slope << " (target "
                  << e.target << " +- " << e.tol << ") "
                  << (e.na ? "n/a" : e.pass ? "pass" : "FAIL") << '\n';
    }
    std::cout << "converge: wrote " << cfg.out_dir << "/{errors.csv,report.json,slope_*.dat}\n";
    return rep.all_pass ? 0 : 1;
}

int cmd_report(const CommonFlags& f) {
    ScenarioConfig cfg = load_config(f);
    ConvergenceReport rep =
        report_from_errors(cfg.out_dir + "/errors.csv", cfg.order, cfg.out_dir);
    std::cout << "report: regenerated " << cfg.out_dir << "/report.json from errors.csv\n";
    return rep.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semiclassical Gross-Pitaevskii boundary-layer toolkit"};
    app.require_subcommand(1);

    std::map<std::string, std::pair<CommonFlags, int (*)(const CommonFlags&)>> cmds;
    cmds["limit-solve"] = {{}, cmd_limit_solve};
    cmds["layer-profile"] = {{}, cmd_layer_profile};
    cmds["wkb-build"] = {{}, cmd_wkb_build};
    cmds["gp-solve"] = {{}, cmd_gp_solve};
    cmds["residual"] = {{}, cmd_residual};
    cmds["converge"] = {{}, cmd_converge};
    cmds["report"] = {{}, cmd_report};

    static const std::map<std::string, std::string> help{
        {"limit-solve", "integrate the limit wave system and export snapshots"},
        {"layer-profile", "closed-form boundary-layer profile at mid-trajectory traces"},
        {"wkb-build", "build the expansion hierarchy and export assembled fields"},
        {"gp-solve", "run the splitting GP solver from assembled initial data"},
        {"residual", "GP residual of the assembled approximation per eps"},
        {"converge", "full eps sweep with error records, slopes and report"},
        {"report", "recompute report.json and slope files from errors.csv"}};

    for (auto& [name, entry] : cmds) {
        CLI::App* sub = app.add_subcommand(name, help.at(name));
        add_common(sub, entry.first);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& [name, entry] : cmds)
            if (app.get_subcommand(name)->parsed()) return entry.second(entry.first);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
