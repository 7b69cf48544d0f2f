#include "gpbl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gpbl/corrector.hpp"
#include "gpbl/csv_io.hpp"
#include "gpbl/layer.hpp"
#include "gpbl/norms.hpp"
#include "gpbl/stencil.hpp"
#include "gpbl/trace.hpp"

namespace gpbl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

int round_up_multiple(int n, int k) { return ((n + k - 1) / k) * k; }

}  // namespace

ScenarioConfig ScenarioConfig::from_string(const std::string& text) {
    ScenarioConfig cfg;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: expected `key = value`, got: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "delta")
            cfg.delta = std::stod(val);
        else if (key == "bump_lo")
            cfg.bump_lo = std::stod(val);
        else if (key == "bump_hi")
            cfg.bump_hi = std::stod(val);
        else if (key == "z_max")
            cfg.z_max = std::stod(val);
        else if (key == "T")
            cfg.T = std::stod(val);
        else if (key == "order")
            cfg.order = std::stoi(val);
        else if (key == "eps")
            cfg.eps = parse_double_list(val);
        else if (key == "out_dir")
            cfg.out_dir = val;
        else
            throw std::runtime_error("config: unknown key: " + key);
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

void ScenarioConfig::validate() const {
    if (!(delta >= 0.0 && delta <= 0.2))
        throw std::runtime_error("config: delta must lie in [0, 0.2]");
    if (!(0.0 < bump_lo && bump_lo < bump_hi && bump_hi < z_max))
        throw std::runtime_error("config: need 0 < bump_lo < bump_hi < z_max");
    if (!(T > 0.0)) throw std::runtime_error("config: T must be positive");
    if (order < 0 || order > 2) throw std::runtime_error("config: order must be 0, 1 or 2");
    if (eps.empty()) throw std::runtime_error("config: eps list is empty");
    for (size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) throw std::runtime_error("config: eps values must be positive");
        if (i > 0 && !(eps[i] < eps[i - 1]))
            throw std::runtime_error("config: eps list must be strictly decreasing");
    }
    if (out_dir.empty()) throw std::runtime_error("config: out_dir is empty");
}

Grid ScenarioConfig::make_grid() const {
    const double eps_min = *std::min_element(eps.begin(), eps.end());
    int n1 = static_cast<int>(std::ceil(z_max * 16.0 / eps_min - 1e-9));
    n1 = round_up_multiple(n1, 16);
    return Grid::line(z_max, n1 + 1);
}

int ScenarioConfig::hierarchy_intervals() const {
    const double dz = make_grid().dz();
    const int ns = static_cast<int>(std::ceil(T / (0.4 * dz) - 1e-9));
    return round_up_multiple(std::max(ns, 4), 4);
}

double ScenarioConfig::data_size() const {
    const Grid g = make_grid();
    RealField da = RealField::sampled(g, [&](double z, double) { return delta * bump(*this, z); });
    RealField phi00 = da;  // a00 - 1 and phi00 share the bump profile
    RealField gz = gradient_z(phi00);
    const double na = norm(da, NormKind::l2), ng = norm(gz, NormKind::l2);
    return std::sqrt(na * na + ng * ng);
}

double bump(const ScenarioConfig& cfg, double z) {
    const double s = (2.0 * z - (cfg.bump_lo + cfg.bump_hi)) / (cfg.bump_hi - cfg.bump_lo);
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

namespace {

// centered time differences of a trajectory, one-sided second order at the ends
std::vector<RealField> time_derivative(const std::vector<RealField>& f, double dt) {
    const int ns = static_cast<int>(f.size());
    std::vector<RealField> out(ns, RealField(f[0].grid()));
    if (ns < 3) return out;
    for (int n = 0; n < ns; ++n)
        for (int i = 0; i < f[n].size(); ++i) {
            if (n == 0)
                out[n][i] = (-3.0 * f[0][i] + 4.0 * f[1][i] - f[2][i]) / (2.0 * dt);
            else if (n == ns - 1)
                out[n][i] = (3.0 * f[n][i] - 4.0 * f[n - 1][i] + f[n - 2][i]) / (2.0 * dt);
            else
                out[n][i] = (f[n + 1][i] - f[n - 1][i]) / (2.0 * dt);
        }
    return out;
}

std::vector<std::vector<double>> time_derivative(const std::vector<std::vector<double>>& f,
                                                 double dt) {
    const int ns = static_cast<int>(f.size());
    std::vector<std::vector<double>> out(ns, std::vector<double>(f[0].size(), 0.0));
    if (ns < 3) return out;
    for (int n = 0; n < ns; ++n)
        for (size_t j = 0; j < f[n].size(); ++j) {
            if (n == 0)
                out[n][j] = (-3.0 * f[0][j] + 4.0 * f[1][j] - f[2][j]) / (2.0 * dt);
            else if (n == ns - 1)
                out[n][j] = (3.0 * f[n][j] - 4.0 * f[n - 1][j] + f[n - 2][j]) / (2.0 * dt);
            else
                out[n][j] = (f[n + 1][j] - f[n - 1][j]) / (2.0 * dt);
        }
    return out;
}

}  // namespace

WKBExpansion build_hierarchy(const ScenarioConfig& cfg) {
    const Grid g = cfg.make_grid();
    if (g.has_y())
        throw std::invalid_argument("build_hierarchy: tangentially homogeneous scenarios only");
    const int m = cfg.order;
    const int nintervals = cfg.hierarchy_intervals();
    const double dt = cfg.T / nintervals;

    RealField a00 = RealField::sampled(g, [&](double z, double) { return 1.0 + cfg.delta * bump(cfg, z); });
    RealField phi00 = RealField::sampled(g, [&](double z, double) { return cfg.delta * bump(cfg, z); });

    LimitTrajectory traj = solve_phi0(phi00, a00, cfg.T, dt);
    Background bg = Background::from_trajectory(traj);
    const int ns = bg.steps();

    // one-sided boundary traces per outer order (z-derivatives 0..4)
    std::vector<std::vector<std::vector<double>>> tr_a, tr_phi, dtr_phi;
    std::vector<CorrectorPair> pairs;
    auto trace_of = [](const RealField& f) {
        TraceRecord rec = boundary_trace(f, 4);
        std::vector<double> out(5);
        for (int j = 0; j <= 4; ++j) out[j] = rec.value(j, 0);
        return out;
    };
    auto extend_traces = [&](int upto) {
        while (static_cast<int>(tr_a.size()) <= upto) {
            const int l = static_cast<int>(tr_a.size());
            std::vector<std::vector<double>> ta(ns), tp(ns);
            for (int n = 0; n < ns; ++n) {
                ta[n] = trace_of(l == 0 ? bg.a0[n] : pairs[l - 1].a[n]);
                tp[n] = trace_of(l == 0 ? bg.phi0[n] : pairs[l - 1].phi[n]);
            }
            dtr_phi.push_back(time_derivative(tp, dt));
            tr_a.push_back(std::move(ta));
            tr_phi.push_back(std::move(tp));
        }
    };
    extend_traces(0);

    // order-0 layer profiles on a Z-grid shared across steps
    std::vector<LayerInputs> inputs(ns);
    double h0_min = std::numeric_limits<double>::infinity();
    for (int n = 0; n < ns; ++n) {
        inputs[n] = LayerInputs{tr_a[0][n][0], tr_phi[0][n][1]};
        inputs[n].validate();
        h0_min = std::min(h0_min, compute_C2(inputs[n]).h0);
    }
    const Grid zg = layer_grid(h0_min);

    std::vector<std::vector<RealField>> A(1), Phi(1);
    A[0].reserve(ns);
    Phi[0].reserve(ns);
    for (int n = 0; n < ns; ++n) {
        A[0].push_back(profile_A0(inputs[n], zg));
        Phi[0].push_back(profile_Phi1(inputs[n], A[0][n]));
    }
    std::vector<std::vector<RealField>> dt_A{time_derivative(A[0], dt)};
    std::vector<std::vector<RealField>> dt_Phi{time_derivative(Phi[0], dt)};

    for (int k = -1; k <= m; ++k) {
        if (k >= 0) {
            // layer stage k: A_{k+1} and Phi_{k+2} from the order-k sources
            extend_traces(k + 1);
            std::vector<RealField> Ak1, Pk2;
            Ak1.reserve(ns);
            Pk2.reserve(ns);
            for (int n = 0; n < ns; ++n) {
                LayerTimeSlice slice;
                slice.t = bg.t[n];
                for (int l = 0; l <= k + 1; ++l) {
                    slice.tr_a.push_back(tr_a[l][n]);
                    slice.tr_phi.push_back(tr_phi[l][n]);
                    slice.dt_tr_phi.push_back(dtr_phi[l][n]);
                }
                for (int l = 0; l <= k; ++l) {
                    slice.A.push_back(A[l][n]);
                    slice.Phi.push_back(Phi[l][n]);
                    slice.dt_A.push_back(dt_A[l][n]);
                    slice.dt_Phi.push_back(dt_Phi[l][n]);
                }
                SourceTerms src = source_terms(k, slice);
                Stiffness st = stiffness_g(inputs[n], A[0][n]);
                Ak1.push_back(solve_layer_bvp(st.g, src.Gtilde, tr_a[k + 1][n][0]));
                Pk2.push_back(compute_Phi_kp2(inputs[n], A[0][n], Ak1.back(), src.F).Phi);
            }
            dt_A.push_back(time_derivative(Ak1, dt));
            dt_Phi.push_back(time_derivative(Pk2, dt));
            A.push_back(std::move(Ak1));
            Phi.push_back(std::move(Pk2));
        }
        // corrector of order k+2, boundary condition from Phi_{k+2}(Z = 0)
        CorrectorInputs ci;
        ci.a_in = RealField(g);
        ci.phi_in = RealField(g);
        ci.Phi_trace.resize(ns);
        for (int n = 0; n < ns; ++n) ci.Phi_trace[n] = {Phi[k + 1][n][0]};
        pairs.push_back(build_corrector(k, bg, pairs, ci));
    }

    WKBExpansion w;
    w.m = m;
    w.grid = g;
    w.dt = dt;
    w.t = bg.t;
    w.a.resize(m + 2);
    w.phi.resize(m + 3);
    w.a[0] = std::move(bg.a0);
    w.phi[0] = std::move(bg.phi0);
    for (int j = 1; j <= m + 2; ++j) {
        if (j <= m + 1) w.a[j] = std::move(pairs[j - 1].a);
        w.phi[j] = std::move(pairs[j - 1].phi);
    }
    w.A = std::move(A);
    w.Phi = std::move(Phi);
    w.validate();
    return w;
}

WDecomp error_decomposition(const ComplexField& psi, const Assembled& approx, double eps) {
    const Grid& g = psi.grid();
    if (!(approx.a.grid() == g))
        throw std::invalid_argument("error_decomposition: grid mismatch");
    WDecomp out{ComplexField(g), RealField(g), RealField(g), 0.0};
    for (int i = 0; i < g.nodes(); ++i) {
        const std::complex<double> w =
            psi[i] * std::polar(1.0, -approx.phi[i] / eps) - approx.a[i];
        out.w[i] = w;
        out.wr[i] = w.real();
        out.wi[i] = w.imag();
    }
    for (int iy = 0; iy < g.ny; ++iy)
        out.boundary_sup = std::max(out.boundary_sup, std::abs(out.w.at(0, iy)));
    return out;
}

ComplexField q_nonlinearity(const ComplexField& w, const RealField& a) {
    if (!(w.grid() == a.grid())) throw std::invalid_argument("q_nonlinearity: grid mismatch");
    ComplexField out(w.grid());
    for (int i = 0; i < w.size(); ++i) {
        const double wr = w[i].real(), wi = w[i].imag();
        const double mod2 = wr * wr + wi * wi;
        out[i] = a[i] * mod2 + w[i] * (mod2 + 2.0 * a[i] * wr);
    }
    return out;
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) throw std::invalid_argument("fit_slope: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(pts.size());
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        if (!(pts[i].first > 0.0) || !(pts[i].second > 0.0))
            throw std::invalid_argument("fit_slope: requires positive abscissae and values");
        xs[i] = std::log(pts[i].first);
        ys[i] = std::log(pts[i].second);
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-14) throw std::invalid_argument("fit_slope: degenerate abscissae");
    SlopeFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy * sxx - sx * sxy) / det;
    for (int i = 0; i < n; ++i)
        fit.residual = std::max(fit.residual,
                                std::abs(ys[i] - fit.intercept - fit.slope * xs[i]));
    return fit;
}

const std::vector<std::string>& norm_kinds() {
    static const std::vector<std::string> kinds{"w_l2", "w_sup", "gradw_sup", "wr_l2",
                                               "gp_resid_l2"};
    return kinds;
}

SlopeEntry slope_target(const std::string& kind, int m) {
    SlopeEntry e;
    if (kind == "w_l2") {
        e.target = m;
        e.tol = 0.3;
    } else if (kind == "w_sup" || kind == "gradw_sup") {
        e.target = m - 1;
        e.tol = 0.4;
    } else if (kind == "wr_l2" || kind == "gp_resid_l2") {
        e.target = m + 1;
        e.tol = 0.3;
    } else {
        throw std::invalid_argument("slope_target: unknown norm kind " + kind);
    }
    return e;
}

namespace {

double grad_w_sup(const ComplexField& psi, const Assembled& approx, double eps) {
    const Grid& g = psi.grid();
    ComplexField psi_z = gradient_z(psi);
    RealField az = gradient_z(approx.a), pz = gradient_z(approx.phi);
    const std::complex<double> iu(0.0, 1.0);
    double sup = 0.0;
    auto accumulate = [&](const ComplexField& dpsi, const RealField& da, const RealField& dp) {
        for (int i = 0; i < g.nodes(); ++i) {
            const std::complex<double> phase = std::polar(1.0, -approx.phi[i] / eps);
            const std::complex<double> wgrad =
                phase * dpsi[i] - (iu / eps) * dp[i] * phase * psi[i] - da[i];
            sup = std::max(sup, std::abs(wgrad));
        }
    };
    accumulate(psi_z, az, pz);
    if (g.has_y()) {
        ComplexField psi_y = gradient_y(psi);
        RealField ay = gradient_y(approx.a), py = gradient_y(approx.phi);
        accumulate(psi_y, ay, py);
    }
    return sup;
}

void fill_slopes(ConvergenceReport& rep) {
    // per norm kind: max over the sample times of each eps, then a log-log fit;
    // slopes need at least 3 eps values and errors above round-off
    rep.all_pass = true;
    for (const std::string& kind : norm_kinds()) {
        std::vector<std::pair<double, double>> pts;
        double vmax = 0.0;
        for (double e : rep.eps) {
            double v = 0.0;
            for (const ErrorRecord& r : rep.records)
                if (r.eps == e && r.norms.count(kind)) v = std::max(v, r.norms.at(kind));
            vmax = std::max(vmax, v);
            pts.push_back({e, std::max(v, 1e-300)});
        }
        SlopeEntry entry = slope_target(kind, rep.m);
        if (pts.size() < 3 || vmax < 1e-13) {
            entry.na = true;
            entry.pass = true;
        } else {
            entry.slope = fit_slope(pts).slope;
            entry.pass = entry.slope >= entry.target - entry.tol;
        }
        rep.all_pass = rep.all_pass && entry.pass;
        rep.slopes[kind] = entry;
    }
}

}  // namespace

void write_report_files(const ConvergenceReport& rep, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    {
        std::ofstream csv(out_dir + "/errors.csv");
        csv << "eps,norm_kind,t,value\n";
        for (const ErrorRecord& r : rep.records)
            for (const std::string& kind : norm_kinds())
                if (r.norms.count(kind))
                    csv << format_double(r.eps) << ',' << kind << ',' << format_double(r.t)
                        << ',' << format_double(r.norms.at(kind)) << '\n';
    }

    for (const std::string& kind : norm_kinds()) {
        std::ofstream dat(out_dir + "/slope_" + kind + ".dat");
        for (double e : rep.eps) {
            double v = 0.0;
            for (const ErrorRecord& r : rep.records)
                if (r.eps == e && r.norms.count(kind)) v = std::max(v, r.norms.at(kind));
            if (v > 0.0)
                dat << format_double(std::log10(e)) << ' ' << format_double(std::log10(v))
                    << '\n';
        }
    }

    nlohmann::ordered_json j;
    j["m"] = rep.m;
    j["data_size"] = rep.data_size;
    j["eps"] = rep.eps;
    nlohmann::ordered_json norms;
    for (const std::string& kind : norm_kinds()) {
        if (!rep.slopes.count(kind)) continue;
        const SlopeEntry& e = rep.slopes.at(kind);
        norms[kind] = {{"slope", e.slope}, {"target", e.target}, {"tol", e.tol},
                       {"pass", e.pass}, {"na", e.na}};
    }
    j["norms"] = norms;
    j["all_pass"] = rep.all_pass;
    std::ofstream(out_dir + "/report.json") << j.dump(2) << '\n';
}

ConvergenceReport run_convergence(const ScenarioConfig& cfg) {
    cfg.validate();
    WKBExpansion w = build_hierarchy(cfg);
    const int ns_last = w.steps() - 1;

    ConvergenceReport rep;
    rep.m = cfg.order;
    rep.data_size = cfg.data_size();
    rep.eps = cfg.eps;

    for (double eps : cfg.eps) {
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
        nsteps = round_up_multiple(std::max(nsteps, 4), 4);
        GPOptions opts;
        opts.dt = cfg.T / nsteps;
        opts.save_every = nsteps / 4;
        GPTrajectory traj = gp_solve(psi0, cfg.T, eps, opts);

        for (double tq : {0.5 * cfg.T, cfg.T}) {
            const int hstep =
                std::min(static_cast<int>(std::lround(tq / w.dt)), ns_last);
            const int rstep = std::min(std::max(hstep, 1), ns_last - 1);
            Assembled approx = assemble(w, hstep);
            const ComplexField& psi = traj.psi[traj.step_at(tq)];
            WDecomp wd = error_decomposition(psi, approx, eps);
            ResidualRecord rr = residuals(w, rstep);

            ErrorRecord rec;
            rec.eps = eps;
            rec.t = tq;
            rec.norms["w_l2"] = norm(wd.w, NormKind::l2);
            rec.norms["w_sup"] = norm(wd.w, NormKind::sup);
            rec.norms["gradw_sup"] = grad_w_sup(psi, approx, eps);
            rec.norms["wr_l2"] = norm(wd.wr, NormKind::l2);
            rec.norms["gp_resid_l2"] = rr.norm_gp_l2;
            rep.records.push_back(std::move(rec));
        }
    }

    fill_slopes(rep);
    write_report_files(rep, cfg.out_dir);
    return rep;
}

ConvergenceReport report_from_errors(const std::string& errors_csv, int m,
                                     const std::string& out_dir) {
    std::ifstream in(errors_csv);
    if (!in) throw std::runtime_error("report: cannot open " + errors_csv);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "eps,norm_kind,t,value")
        throw std::runtime_error("report: bad errors.csv header");

    ConvergenceReport rep;
    rep.m = m;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string se, kind, st, sv;
        if (!std::getline(ss, se, ',') || !std::getline(ss, kind, ',') ||
            !std::getline(ss, st, ',') || !std::getline(ss, sv))
            throw std::runtime_error("report: bad errors.csv row: " + line);
        const double e = std::stod(se), t = std::stod(st), v = std::stod(sv);
        if (std::find(rep.eps.begin(), rep.eps.end(), e) == rep.eps.end())
            rep.eps.push_back(e);
        ErrorRecord* rec = nullptr;
        for (ErrorRecord& r : rep.records)
            if (r.eps == e && r.t == t) rec = &r;
        if (!rec) {
            rep.records.push_back(ErrorRecord{e, t, {}});
            rec = &rep.records.back();
        }
        rec->norms[kind] = v;
    }
    fill_slopes(rep);
    write_report_files(rep, out_dir);
    return rep;
}

}  // namespace gpbl
