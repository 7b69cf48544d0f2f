#include "gpbl/limit_system.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gpbl/csv_io.hpp"
#include "gpbl/norms.hpp"
#include "gpbl/stencil.hpp"

namespace gpbl {

namespace {

RealField grad_sq(const RealField& f) {
    RealField gz = gradient_z(f);
    RealField out(f.grid());
    if (f.grid().has_y()) {
        RealField gy = gradient_y(f);
        for (int i = 0; i < out.size(); ++i) out[i] = gz[i] * gz[i] + gy[i] * gy[i];
    } else {
        for (int i = 0; i < out.size(); ++i) out[i] = gz[i] * gz[i];
    }
    return out;
}

// d_t^2 phi = Lap phi - grad phi . grad v - div((v + |grad phi|^2/2) grad phi)
RealField wave_rhs(const RealField& phi, const RealField& v) {
    const Grid& g = phi.grid();
    RealField lap = laplacian(phi, ZBoundary::zero);
    RealField gz = gradient_z(phi);
    RealField gy = gradient_y(phi);
    RealField vz = gradient_z(v);
    RealField vy = gradient_y(v);

    RealField coef(g);  // v + |grad phi|^2/2
    for (int i = 0; i < coef.size(); ++i)
        coef[i] = v[i] + 0.5 * (gz[i] * gz[i] + gy[i] * gy[i]);
    RealField flux_z = coef * gz;
    RealField flux_y = coef * gy;
    RealField div_flux = divergence(flux_z, flux_y, ZBoundary::zero);

    RealField out(g);
    for (int i = 0; i < out.size(); ++i)
        out[i] = lap[i] - (gz[i] * vz[i] + gy[i] * vy[i]) - div_flux[i];
    return out;
}

void zero_z_rows(RealField& f) {
    const Grid& g = f.grid();
    for (int iy = 0; iy < g.ny; ++iy) {
        f.at(0, iy) = 0.0;
        f.at(g.nz - 1, iy) = 0.0;
    }
}

}  // namespace

LimitState LimitTrajectory::state(int k) const {
    LimitState s;
    s.t = t.at(k);
    s.phi0 = phi.at(k);
    s.dphi0_dt = dphi_dt.at(k);
    auto [rho, a] = recover_density(s.phi0, s.dphi0_dt, s.t);
    s.rho0 = std::move(rho);
    s.a0 = std::move(a);
    return s;
}

int LimitTrajectory::step_at(double tq) const {
    int k = static_cast<int>(std::lround(tq / dt));
    if (k < 0 || k >= steps()) throw std::out_of_range("LimitTrajectory::step_at: time outside trajectory");
    return k;
}

LimitTrajectory solve_phi0(const RealField& phi00, const RealField& a00, double T,
                           double dt, const LimitOptions& opts) {
    const Grid& g = phi00.grid();
    if (!(a00.grid() == g)) throw std::invalid_argument("solve_phi0: grid mismatch");
    double h = g.dz();
    if (g.has_y()) h = std::min(h, g.dy());
    if (dt > opts.cfl * h)
        throw CflError("solve_phi0: dt exceeds CFL limit " + format_double(opts.cfl * h));

    // phi01 = 1 - a00^2 - |grad phi00|^2/2
    RealField gsq = grad_sq(phi00);
    RealField phi01(g);
    double amp = 0.0;
    for (int i = 0; i < phi01.size(); ++i) {
        phi01[i] = 1.0 - a00[i] * a00[i] - 0.5 * gsq[i];
        amp = std::max(amp, std::max(std::abs(a00[i] - 1.0), std::abs(phi00[i])));
    }
    if (amp > opts.delta_max)
        throw std::invalid_argument("solve_phi0: data amplitude exceeds admissible bound");

    LimitTrajectory traj;
    traj.grid = g;
    traj.dt = dt;
    traj.a00 = a00;
    traj.phi00 = phi00;
    traj.phi01 = phi01;

    const int nsteps = static_cast<int>(std::lround(T / dt));
    RealField phi_prev = phi00;
    zero_z_rows(phi_prev);
    RealField acc = wave_rhs(phi_prev, phi01);
    RealField phi_cur = phi_prev;
    for (int i = 0; i < phi_cur.size(); ++i)
        phi_cur[i] = phi_prev[i] + dt * phi01[i] + 0.5 * dt * dt * acc[i];
    zero_z_rows(phi_cur);

    traj.t.push_back(0.0);
    traj.phi.push_back(phi_prev);

    for (int n = 1; n <= nsteps; ++n) {
        traj.t.push_back((n)*dt);
        traj.phi.push_back(phi_cur);
        if (n == nsteps) break;

        // second-order predictor for d_t phi at t_n from the midpoint rate
        RealField v(g);
        for (int i = 0; i < v.size(); ++i)
            v[i] = (phi_cur[i] - phi_prev[i]) / dt + 0.5 * dt * acc[i];

        RealField rho = grad_sq(phi_cur);
        double rho_min_now = 2.0;
        for (int i = 0; i < rho.size(); ++i)
            rho_min_now = std::min(rho_min_now, 1.0 - v[i] - 0.5 * rho[i]);
        if (rho_min_now <= opts.rho_min)
            throw DensityFloorError("solve_phi0: density floor violated at t = " +
                                        format_double(n * dt),
                                    n * dt);

        acc = wave_rhs(phi_cur, v);
        RealField phi_next(g);
        for (int i = 0; i < phi_next.size(); ++i)
            phi_next[i] = 2.0 * phi_cur[i] - phi_prev[i] + dt * dt * acc[i];
        zero_z_rows(phi_next);
        phi_prev = std::move(phi_cur);
        phi_cur = std::move(phi_next);
    }

    // centered time derivatives (one-sided second order at the ends)
    const int ns = traj.steps();
    traj.dphi_dt.resize(ns, RealField(g));
    for (int k = 0; k < ns; ++k) {
        RealField d(g);
        if (k == 0 && ns >= 3) {
            for (int i = 0; i < d.size(); ++i)
                d[i] = (-3.0 * traj.phi[0][i] + 4.0 * traj.phi[1][i] - traj.phi[2][i]) / (2.0 * dt);
        } else if (k == ns - 1 && ns >= 3) {
            for (int i = 0; i < d.size(); ++i)
                d[i] = (3.0 * traj.phi[k][i] - 4.0 * traj.phi[k - 1][i] + traj.phi[k - 2][i]) /
                       (2.0 * dt);
        } else if (k > 0 && k < ns - 1) {
            for (int i = 0; i < d.size(); ++i)
                d[i] = (traj.phi[k + 1][i] - traj.phi[k - 1][i]) / (2.0 * dt);
        } else {
            d = phi01;
        }
        traj.dphi_dt[k] = std::move(d);
    }
    // exact initial velocity at t = 0
    traj.dphi_dt[0] = phi01;
    return traj;
}

std::pair<RealField, RealField> recover_density(const RealField& phi0,
                                                const RealField& dphi0_dt, double t,
                                                double rho_min) {
    RealField gsq = grad_sq(phi0);
    RealField rho(phi0.grid()), a(phi0.grid());
    for (int i = 0; i < rho.size(); ++i) {
        rho[i] = 1.0 - dphi0_dt[i] - 0.5 * gsq[i];
        if (rho[i] <= rho_min)
            throw DensityFloorError("recover_density: nonpositive/floor density", t);
        a[i] = std::sqrt(rho[i]);
    }
    return {std::move(rho), std::move(a)};
}

double energy_tan(const LimitTrajectory& traj, int step, int s) {
    if (s < 1 || s > 2) throw std::invalid_argument("energy_tan: order s must be 1 or 2");
    const Grid& g = traj.grid;
    const double dt = traj.dt;
    auto l2sq = [](const RealField& f) {
        double n = norm(f, NormKind::l2);
        return n * n;
    };

    double e = l2sq(traj.dphi_dt[step]) + l2sq(gradient_z(traj.phi[step]));
    if (g.has_y()) e += l2sq(gradient_y(traj.phi[step]));
    if (s == 2) {
        // d_t branch: d_t^2 phi and grad d_t phi
        RealField d2(g);
        const int ns = traj.steps();
        int k = std::clamp(step, 1, ns - 2);
        for (int i = 0; i < d2.size(); ++i)
            d2[i] = (traj.phi[k + 1][i] - 2.0 * traj.phi[k][i] + traj.phi[k - 1][i]) / (dt * dt);
        e += l2sq(d2) + l2sq(gradient_z(traj.dphi_dt[step]));
        if (g.has_y()) {
            e += l2sq(gradient_y(traj.dphi_dt[step]));
            // grad_y branch
            RealField py = gradient_y(traj.phi[step]);
            RealField pyt = gradient_y(traj.dphi_dt[step]);
            e += l2sq(pyt) + l2sq(gradient_z(py)) + l2sq(gradient_y(py));
        }
    }
    return e;
}

void export_trajectory(const LimitTrajectory& traj, const std::string& dir, int save_every) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream index(dir + "/index.csv");
    index << "step,t,min_rho,E1tan\n";
    for (int k = 0; k < traj.steps(); k += save_every) {
        LimitState s = traj.state(k);
        double mr = s.rho0[0];
        for (int i = 1; i < s.rho0.size(); ++i) mr = std::min(mr, s.rho0[i]);
        write_field_csv(dir + "/phi0_" + std::to_string(k) + ".csv", s.phi0);
        index << k << ',' << format_double(s.t) << ',' << format_double(mr) << ','
              << format_double(energy_tan(traj, k, 1)) << '\n';
    }
}

}  // namespace gpbl
