#include "gpbl/corrector.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gpbl/csv_io.hpp"
#include "gpbl/stencil.hpp"

namespace gpbl {

namespace {

RealField dot_grad(const RealField& f, const RealField& g) {
    RealField out(f.grid());
    RealField fz = gradient_z(f), gz = gradient_z(g);
    if (f.grid().has_y()) {
        RealField fy = gradient_y(f), gy = gradient_y(g);
        for (int i = 0; i < out.size(); ++i) out[i] = fz[i] * gz[i] + fy[i] * gy[i];
    } else {
        for (int i = 0; i < out.size(); ++i) out[i] = fz[i] * gz[i];
    }
    return out;
}

// div(c * grad f)
RealField div_coef_grad(const RealField& c, const RealField& f, ZBoundary bc) {
    return divergence(c * gradient_z(f), c * gradient_y(f), bc);
}

void inject_boundary(RealField& f, const std::vector<std::vector<double>>& gbc, int step) {
    const Grid& g = f.grid();
    for (int iy = 0; iy < g.ny; ++iy) {
        f.at(0, iy) = gbc.empty() ? 0.0 : gbc.at(step).at(iy);
        f.at(g.nz - 1, iy) = 0.0;
    }
}

}  // namespace

Background Background::from_trajectory(const LimitTrajectory& traj) {
    Background bg;
    bg.grid = traj.grid;
    bg.dt = traj.dt;
    bg.t = traj.t;
    for (int k = 0; k < traj.steps(); ++k) {
        LimitState s = traj.state(k);
        bg.phi0.push_back(std::move(s.phi0));
        bg.dphi0_dt.push_back(std::move(s.dphi0_dt));
        bg.a0.push_back(std::move(s.a0));
        bg.rho0.push_back(std::move(s.rho0));
    }
    return bg;
}

namespace {

// spatial part of P applied to phi with d_t phi = v, at background step n:
//   -div(rho0 grad phi) + 2 grad phi0 . grad v
//   + div((grad phi0 . grad phi) grad phi0) + grad(d_t phi0) . grad phi
//   + Lap phi0 * v
RealField p_spatial(const Background& bg, int n, const RealField& phi, const RealField& v,
                    ZBoundary bc) {
    const RealField& phi0 = bg.phi0[n];
    RealField out = -1.0 * div_coef_grad(bg.rho0[n], phi, bc);
    RealField cross = dot_grad(phi0, phi);
    RealField dv = divergence(cross * gradient_z(phi0), cross * gradient_y(phi0), bc);
    RealField g1 = dot_grad(phi0, v);
    RealField g2 = dot_grad(bg.dphi0_dt[n], phi);
    RealField lap0 = laplacian(phi0, bc);
    for (int i = 0; i < out.size(); ++i)
        out[i] += 2.0 * g1[i] + dv[i] + g2[i] + lap0[i] * v[i];
    return out;
}

}  // namespace

RealField apply_P(const Background& bg, int step, const RealField& phi_prev,
                  const RealField& phi_cur, const RealField& phi_next) {
    if (!(phi_cur.grid() == bg.grid)) throw std::invalid_argument("apply_P: grid mismatch");
    const double dt = bg.dt;
    RealField v(bg.grid), d2(bg.grid);
    for (int i = 0; i < v.size(); ++i) {
        v[i] = (phi_next[i] - phi_prev[i]) / (2.0 * dt);
        d2[i] = (phi_next[i] - 2.0 * phi_cur[i] + phi_prev[i]) / (dt * dt);
    }
    RealField sp = p_spatial(bg, step, phi_cur, v, ZBoundary::one_sided);
    return d2 + sp;
}

WaveSolution solve_linear_wave(const Background& bg, const std::vector<RealField>& forcing,
                               const std::vector<std::vector<double>>& gbc,
                               const RealField& phi_init, const RealField& dphi_init,
                               const LimitOptions& opts) {
    const Grid& g = bg.grid;
    const double dt = bg.dt;
    double h = g.dz();
    if (g.has_y()) h = std::min(h, g.dy());
    if (dt > opts.cfl * h)
        throw CflError("solve_linear_wave: dt exceeds CFL limit " + format_double(opts.cfl * h));
    const int ns = bg.steps();

    auto rhs = [&](int n, const RealField& phi, const RealField& v) {
        RealField r = -1.0 * p_spatial(bg, n, phi, v, ZBoundary::zero);
        if (!forcing.empty())
            for (int i = 0; i < r.size(); ++i) r[i] += forcing.at(n)[i];
        return r;
    };

    WaveSolution sol;
    RealField phi_prev = phi_init;
    inject_boundary(phi_prev, gbc, 0);
    RealField acc = rhs(0, phi_prev, dphi_init);
    RealField phi_cur = phi_prev;
    if (ns > 1) {
        for (int i = 0; i < phi_cur.size(); ++i)
            phi_cur[i] = phi_prev[i] + dt * dphi_init[i] + 0.5 * dt * dt * acc[i];
        inject_boundary(phi_cur, gbc, 1);
    }

    sol.t.push_back(bg.t[0]);
    sol.phi.push_back(phi_prev);
    for (int n = 1; n < ns; ++n) {
        sol.t.push_back(bg.t[n]);
        sol.phi.push_back(phi_cur);
        if (n == ns - 1) break;

        RealField v(g);
        for (int i = 0; i < v.size(); ++i)
            v[i] = (phi_cur[i] - phi_prev[i]) / dt + 0.5 * dt * acc[i];
        acc = rhs(n, phi_cur, v);
        RealField phi_next(g);
        for (int i = 0; i < phi_next.size(); ++i)
            phi_next[i] = 2.0 * phi_cur[i] - phi_prev[i] + dt * dt * acc[i];
        inject_boundary(phi_next, gbc, n + 1);
        phi_prev = std::move(phi_cur);
        phi_cur = std::move(phi_next);
    }

    const int m = static_cast<int>(sol.phi.size());
    sol.dphi_dt.resize(m, RealField(g));
    for (int n = 0; n < m; ++n) {
        RealField d(g);
        if (n == 0) {
            d = dphi_init;
        } else if (n == m - 1 && m >= 3) {
            for (int i = 0; i < d.size(); ++i)
                d[i] = (3.0 * sol.phi[n][i] - 4.0 * sol.phi[n - 1][i] + sol.phi[n - 2][i]) /
                       (2.0 * dt);
        } else if (n < m - 1) {
            for (int i = 0; i < d.size(); ++i)
                d[i] = (sol.phi[n + 1][i] - sol.phi[n - 1][i]) / (2.0 * dt);
        }
        sol.dphi_dt[n] = std::move(d);
    }
    return sol;
}

namespace {

struct Hierarchy {
    const Background& bg;
    const std::vector<CorrectorPair>& lower;

    const RealField& a(int j, int n) const {
        if (j == 0) return bg.a0[n];
        return lower.at(j - 1).a.at(n);
    }
    const RealField& phi(int j, int n) const {
        if (j == 0) return bg.phi0[n];
        return lower.at(j - 1).phi.at(n);
    }
    const RealField& dphi(int j, int n) const {
        if (j == 0) return bg.dphi0_dt[n];
        return lower.at(j - 1).dphi_dt.at(n);
    }
};

}  // namespace

CorrectorPair build_corrector(int k, const Background& bg,
                              const std::vector<CorrectorPair>& lower,
                              const CorrectorInputs& in) {
    if (k < -1) throw std::invalid_argument("build_corrector: order index k >= -1 required");
    if (static_cast<int>(lower.size()) < k + 1)
        throw std::invalid_argument("build_corrector: missing lower-order correctors");
    const Grid& g = bg.grid;
    const int ns = bg.steps();
    Hierarchy hier{bg, lower};

    // h = (Lap a_k + g^phi_{k+1})/(2 a0); f^a_{k+1}; both zero for the
    // order-1 case
    std::vector<RealField> h(ns, RealField(g)), fa(ns, RealField(g));
    if (k >= 0) {
        for (int n = 0; n < ns; ++n) {
            RealField gphi(g);
            for (int k1 = 1; k1 <= k + 1; ++k1) {
                const RealField da = dot_grad(hier.phi(k1, n), hier.a(k + 2 - k1, n));
                const RealField lap = laplacian(hier.phi(k + 2 - k1, n));
                const RealField& ak1 = hier.a(k1, n);
                const RealField& dp = hier.dphi(k + 2 - k1, n);
                for (int i = 0; i < g.nodes(); ++i) {
                    fa[n][i] -= da[i] + 0.5 * ak1[i] * lap[i];
                    gphi[i] -= ak1[i] * dp[i];
                }
            }
            for (int k1 = 0; k1 <= k + 1; ++k1)
                for (int k2 = 0; k2 <= k + 2 - k1 && k2 <= k + 1; ++k2) {
                    const int k3 = k + 2 - k1 - k2;
                    if (k3 < 0 || k3 > k + 1) continue;
                    const RealField gg = dot_grad(hier.phi(k2, n), hier.phi(k3, n));
                    const RealField& a1 = hier.a(k1, n);
                    const RealField& a2 = hier.a(k2, n);
                    const RealField& a3 = hier.a(k3, n);
                    for (int i = 0; i < g.nodes(); ++i)
                        gphi[i] -= 0.5 * a1[i] * (gg[i] + 2.0 * a2[i] * a3[i]);
                }
            const RealField lap_ak = laplacian(hier.a(k, n));
            for (int i = 0; i < g.nodes(); ++i)
                h[n][i] = (lap_ak[i] + gphi[i]) / (2.0 * bg.a0[n][i]);
        }
    }

    // forcing F_{k+2} = -2 a0 f^a + d_t h + div(h grad phi0)
    std::vector<RealField> forcing(ns, RealField(g));
    if (k >= 0) {
        const double dt = bg.dt;
        for (int n = 0; n < ns; ++n) {
            RealField dth(g);
            if (ns >= 3) {
                if (n == 0)
                    for (int i = 0; i < g.nodes(); ++i)
                        dth[i] = (-3.0 * h[0][i] + 4.0 * h[1][i] - h[2][i]) / (2.0 * dt);
                else if (n == ns - 1)
                    for (int i = 0; i < g.nodes(); ++i)
                        dth[i] = (3.0 * h[n][i] - 4.0 * h[n - 1][i] + h[n - 2][i]) / (2.0 * dt);
                else
                    for (int i = 0; i < g.nodes(); ++i)
                        dth[i] = (h[n + 1][i] - h[n - 1][i]) / (2.0 * dt);
            }
            const RealField& phi0 = bg.phi0[n];
            RealField dv = divergence(h[n] * gradient_z(phi0), h[n] * gradient_y(phi0),
                                      ZBoundary::zero);
            for (int i = 0; i < g.nodes(); ++i)
                forcing[n][i] = -2.0 * bg.a0[n][i] * fa[n][i] + dth[i] + dv[i];
        }
    }

    std::vector<std::vector<double>> gbc;
    if (!in.Phi_trace.empty()) {
        gbc.resize(ns);
        for (int n = 0; n < ns; ++n) {
            gbc[n].resize(g.ny);
            for (int iy = 0; iy < g.ny; ++iy) gbc[n][iy] = -in.Phi_trace.at(n).at(iy);
        }
    }

    // initial velocity: -grad phi0 . grad phi_in - 2 a0 a_in (+ h at t = 0)
    RealField v_init = -1.0 * dot_grad(bg.phi0[0], in.phi_in);
    for (int i = 0; i < g.nodes(); ++i)
        v_init[i] += -2.0 * bg.a0[0][i] * in.a_in[i] + (k >= 0 ? h[0][i] : 0.0);

    WaveSolution sol = solve_linear_wave(bg, k >= 0 ? forcing : std::vector<RealField>{}, gbc,
                                         in.phi_in, v_init);

    CorrectorPair pair;
    pair.order = k + 2;
    pair.t = sol.t;
    pair.a = recover_amplitude(bg, sol, k >= 0 ? h : std::vector<RealField>{});
    pair.phi = std::move(sol.phi);
    pair.dphi_dt = std::move(sol.dphi_dt);
    return pair;
}

std::vector<RealField> recover_amplitude(const Background& bg, const WaveSolution& sol,
                                         const std::vector<RealField>& h) {
    const Grid& g = bg.grid;
    std::vector<RealField> a;
    for (int n = 0; n < static_cast<int>(sol.phi.size()); ++n) {
        RealField cross = dot_grad(bg.phi0[n], sol.phi[n]);
        RealField an(g);
        for (int i = 0; i < g.nodes(); ++i) {
            const double hn = h.empty() ? 0.0 : h[n][i];
            an[i] = (hn - sol.dphi_dt[n][i] - cross[i]) / (2.0 * bg.a0[n][i]);
        }
        a.push_back(std::move(an));
    }
    return a;
}

void export_corrector(const CorrectorPair& p, const std::string& dir, int save_every) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream index(dir + "/index.csv");
    index << "step,t,order\n";
    const std::string tag = std::to_string(p.order);
    for (int n = 0; n < static_cast<int>(p.t.size()); n += save_every) {
        write_field_csv(dir + "/phi" + tag + "_" + std::to_string(n) + ".csv", p.phi[n]);
        write_field_csv(dir + "/a" + tag + "_" + std::to_string(n) + ".csv", p.a[n]);
        index << n << ',' << format_double(p.t[n]) << ',' << p.order << '\n';
    }
}

}  // namespace gpbl
