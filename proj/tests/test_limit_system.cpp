#include <cmath>

#include "doctest.h"
#include "gpbl/limit_system.hpp"
#include "gpbl/norms.hpp"
#include "gpbl/stencil.hpp"

using namespace gpbl;

namespace {

double bump01(double z, double lo, double hi) {
    const double s = (2.0 * z - (lo + hi)) / (hi - lo);
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

LimitTrajectory run_bump(double delta, int nz, double T, double cfl_frac = 0.35) {
    Grid g = Grid::line(8.0, nz);
    RealField a00 =
        RealField::sampled(g, [&](double z, double) { return 1.0 + delta * bump01(z, 1.0, 2.0); });
    RealField phi00 =
        RealField::sampled(g, [&](double z, double) { return delta * bump01(z, 1.0, 2.0); });
    const int ns = static_cast<int>(std::ceil(T / (cfl_frac * g.dz())));
    return solve_phi0(phi00, a00, T, T / ns);
}

}  // namespace

TEST_CASE("constant state is a fixed point") {
    Grid g = Grid::line(4.0, 65);
    RealField a00 = RealField::sampled(g, [](double, double) { return 1.0; });
    RealField phi00(g);
    LimitTrajectory traj = solve_phi0(phi00, a00, 0.5, 0.01);
    for (int k = 0; k < traj.steps(); ++k) {
        LimitState s = traj.state(k);
        CHECK(norm(s.phi0, NormKind::sup) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(norm(s.dphi0_dt, NormKind::sup) == doctest::Approx(0.0).epsilon(1e-14));
        for (int i = 0; i < s.rho0.size(); ++i) CHECK(s.rho0[i] == doctest::Approx(1.0));
    }
}

TEST_CASE("density recovery at t = 0 is nodally exact") {
    Grid g = Grid::line(8.0, 257);
    RealField phi00 =
        RealField::sampled(g, [](double z, double) { return 0.05 * bump01(z, 1.0, 2.0); });
    RealField phi01 =
        RealField::sampled(g, [](double z, double) { return -0.1 * bump01(z, 1.0, 2.0); });
    auto [rho, a] = recover_density(phi00, phi01);
    RealField gz = gradient_z(phi00);
    for (int i = 0; i < rho.size(); ++i) {
        const double want = 1.0 - phi01[i] - 0.5 * gz[i] * gz[i];
        CHECK(rho[i] == doctest::Approx(want).epsilon(1e-14));
        CHECK(a[i] == doctest::Approx(std::sqrt(want)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(recover_density(phi00, RealField::sampled(g, [](double, double) { return 1.0; })),
                    DensityFloorError);
}

TEST_CASE("finite propagation: the far region stays exactly inert") {
    LimitTrajectory traj = run_bump(0.05, 513, 0.5);
    const Grid& g = traj.grid;
    LimitState end = traj.state(traj.steps() - 1);
    for (int i = 0; i < g.nz; ++i) {
        if (g.z(i) < 4.0 || g.z(i) > 7.5) continue;  // support [1,2] + horizon margin
        CHECK(end.phi0[i] == 0.0);
        CHECK(end.a0[i] == 1.0);
    }
    // boundary rows pinned at every step
    for (int k = 0; k < traj.steps(); ++k) {
        CHECK(traj.phi[k].at(0) == 0.0);
        CHECK(traj.phi[k].at(g.nz - 1) == 0.0);
    }
}

TEST_CASE("CFL guard") {
    Grid g = Grid::line(1.0, 101);
    RealField a00 = RealField::sampled(g, [](double, double) { return 1.0; });
    RealField phi00(g);
    CHECK_THROWS_AS(solve_phi0(phi00, a00, 0.1, 0.02), CflError);  // dt > 0.4 dz
}

TEST_CASE("tangential energy is positive and nearly conserved for small data") {
    LimitTrajectory traj = run_bump(0.02, 257, 0.4);
    const double e0 = energy_tan(traj, 1, 1);
    CHECK(e0 > 0.0);
    for (int k = 2; k < traj.steps() - 1; k += traj.steps() / 8) {
        CHECK(energy_tan(traj, k, 1) == doctest::Approx(e0).epsilon(0.05));
    }
}

TEST_CASE("self-convergence at order 2 under (dz, dt) halving") {
    // errors measured against the finest run, sampled on the coarse nodes
    auto phi_at_T = [](int nz) { return run_bump(0.05, nz, 0.4); };
    LimitTrajectory c = phi_at_T(129), m = phi_at_T(257), f = phi_at_T(513);
    auto diff = [](const LimitTrajectory& lo, const LimitTrajectory& hi) {
        const RealField& pl = lo.phi.back();
        const RealField& ph = hi.phi.back();
        const int r = (hi.grid.nz - 1) / (lo.grid.nz - 1);
        double e = 0.0;
        for (int i = 0; i < lo.grid.nz; ++i) e = std::max(e, std::abs(pl[i] - ph[i * r]));
        return e;
    };
    const double e1 = diff(c, f), e2 = diff(m, f);
    const double order = std::log2(e1 / e2);
    CHECK(order == doctest::Approx(2.0).epsilon(0.2));
}
