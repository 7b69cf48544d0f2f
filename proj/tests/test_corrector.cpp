#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gpbl/corrector.hpp"
#include "gpbl/norms.hpp"
#include "gpbl/stencil.hpp"

using namespace gpbl;

namespace {

Background flat_bg(double L, int nz, double T, int ns) {
    Background bg;
    bg.grid = Grid::line(L, nz);
    bg.dt = T / ns;
    RealField zero(bg.grid);
    RealField one = RealField::sampled(bg.grid, [](double, double) { return 1.0; });
    for (int n = 0; n <= ns; ++n) {
        bg.t.push_back(n * bg.dt);
        bg.phi0.push_back(zero);
        bg.dphi0_dt.push_back(zero);
        bg.a0.push_back(one);
        bg.rho0.push_back(one);
    }
    return bg;
}

int steps_for(double T, double dz) { return static_cast<int>(std::ceil(T / (0.25 * dz))); }

}  // namespace

TEST_CASE("apply_P on a flat background is the plain wave operator") {
    // quadratic space/time data keeps every stencil exact
    Background bg = flat_bg(2.0, 21, 1.0, 10);
    auto slab = [&](double t) {
        return RealField::sampled(bg.grid,
                                  [&](double z, double) { return (1.0 + t * t) * (z * z - z); });
    };
    const double dt = bg.dt;
    RealField out = apply_P(bg, 3, slab(3 * dt - dt), slab(3 * dt), slab(3 * dt + dt));
    const double t = 3 * dt;
    for (int i = 0; i < out.size(); ++i) {
        const double z = bg.grid.z(i);
        CHECK(out[i] == doctest::Approx(2.0 * (z * z - z) - 2.0 * (1.0 + t * t))
                            .epsilon(1e-10)
                            .scale(1.0));
    }
}

TEST_CASE("linear wave: manufactured standing mode converges at order 2") {
    // phi* = sin(t) sin(pi z / 2) on [0,2] solves P phi = ((pi/2)^2 - 1) phi*
    const double T = 1.0;
    const double kz = std::numbers::pi / 2.0;
    auto err = [&](int nz) {
        Grid g = Grid::line(2.0, nz);
        const int ns = steps_for(T, g.dz());
        Background bg = flat_bg(2.0, nz, T, ns);
        std::vector<RealField> f;
        for (int n = 0; n <= ns; ++n) {
            const double t = n * bg.dt;
            f.push_back(RealField::sampled(
                g, [&](double z, double) { return (kz * kz - 1.0) * std::sin(t) * std::sin(kz * z); }));
        }
        RealField phi0(g);
        RealField v0 = RealField::sampled(g, [&](double z, double) { return std::sin(kz * z); });
        WaveSolution sol = solve_linear_wave(bg, f, {}, phi0, v0);
        double e = 0.0;
        const double tf = sol.t.back();
        for (int i = 0; i < g.nz; ++i)
            e = std::max(e, std::abs(sol.phi.back()[i] - std::sin(tf) * std::sin(kz * g.z(i))));
        return e;
    };
    const double e1 = err(65), e2 = err(129), e3 = err(257);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(std::log2(e2 / e3) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("linear wave: boundary data drives the interior at order 2") {
    // phi* = sin(t) e^{-z} solves P phi = -2 sin(t) e^{-z} with g(t) = sin(t)
    const double T = 1.0, L = 16.0;
    auto err = [&](int nz) {
        Grid g = Grid::line(L, nz);
        const int ns = steps_for(T, g.dz());
        Background bg = flat_bg(L, nz, T, ns);
        std::vector<RealField> f;
        std::vector<std::vector<double>> gbc;
        for (int n = 0; n <= ns; ++n) {
            const double t = n * bg.dt;
            f.push_back(RealField::sampled(
                g, [&](double z, double) { return -2.0 * std::sin(t) * std::exp(-z); }));
            gbc.push_back({std::sin(t)});
        }
        RealField phi0(g);
        RealField v0 = RealField::sampled(g, [](double z, double) { return std::exp(-z); });
        WaveSolution sol = solve_linear_wave(bg, f, gbc, phi0, v0);
        double e = 0.0;
        const double tf = sol.t.back();
        for (int i = 0; i < g.nz - 1; ++i)
            e = std::max(e, std::abs(sol.phi.back()[i] - std::sin(tf) * std::exp(-g.z(i))));
        return e;
    };
    const double e1 = err(129), e2 = err(257), e3 = err(513);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(std::log2(e2 / e3) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("linear wave is linear in its data") {
    const double T = 0.5, L = 4.0;
    Grid g = Grid::line(L, 65);
    const int ns = steps_for(T, g.dz());
    Background bg = flat_bg(L, 65, T, ns);
    std::vector<RealField> f;
    std::vector<std::vector<double>> gbc;
    for (int n = 0; n <= ns; ++n) {
        const double t = n * bg.dt;
        f.push_back(RealField::sampled(
            g, [&](double z, double) { return std::sin(z + t); }));
        gbc.push_back({0.3 * t});
    }
    RealField phi0 = RealField::sampled(g, [&](double z, double) { return z * (L - z) / 8.0; });
    RealField v0 = RealField::sampled(g, [](double z, double) { return std::cos(z); });
    WaveSolution s1 = solve_linear_wave(bg, f, gbc, phi0, v0);

    std::vector<RealField> f2;
    std::vector<std::vector<double>> gbc2;
    for (int n = 0; n <= ns; ++n) {
        f2.push_back(2.0 * f[n]);
        gbc2.push_back({2.0 * gbc[n][0]});
    }
    WaveSolution s2 = solve_linear_wave(bg, f2, gbc2, 2.0 * phi0, 2.0 * v0);
    for (int n = 0; n <= ns; n += ns / 4)
        for (int i = 0; i < g.nz; ++i)
            CHECK(s2.phi[n][i] == doctest::Approx(2.0 * s1.phi[n][i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("CFL guard on the wave solver") {
    Background bg = flat_bg(1.0, 11, 1.0, 10);  // dt = 0.1 > 0.4 * dz = 0.04
    RealField z0(bg.grid);
    CHECK_THROWS_AS(solve_linear_wave(bg, {}, {}, z0, z0), CflError);
}

TEST_CASE("order-1 corrector with zero inputs is identically zero") {
    Grid g = Grid::line(4.0, 65);
    Background bg = flat_bg(4.0, 65, 0.5, steps_for(0.5, g.dz()));
    CorrectorInputs in;
    in.a_in = RealField(g);
    in.phi_in = RealField(g);
    CorrectorPair p = build_corrector(-1, bg, {}, in);
    CHECK(p.order == 1);
    for (const RealField& f : p.phi) CHECK(norm(f, NormKind::sup) == 0.0);
    for (const RealField& f : p.a) CHECK(norm(f, NormKind::sup) == 0.0);
}

TEST_CASE("amplitude recovery inverts the phase velocity on a flat background") {
    // with phi0 = 0, a0 = 1: a = -d_t phi / 2
    const double T = 1.0;
    const double kz = std::numbers::pi / 2.0;
    Grid g = Grid::line(2.0, 257);
    const int ns = steps_for(T, g.dz());
    Background bg = flat_bg(2.0, 257, T, ns);
    std::vector<RealField> f;
    for (int n = 0; n <= ns; ++n) {
        const double t = n * bg.dt;
        f.push_back(RealField::sampled(
            g, [&](double z, double) { return (kz * kz - 1.0) * std::sin(t) * std::sin(kz * z); }));
    }
    RealField phi0(g);
    RealField v0 = RealField::sampled(g, [&](double z, double) { return std::sin(kz * z); });
    WaveSolution sol = solve_linear_wave(bg, f, {}, phi0, v0);
    std::vector<RealField> a = recover_amplitude(bg, sol, {});
    const int n = ns / 2;
    const double t = sol.t[n];
    for (int i = 0; i < g.nz; ++i)
        CHECK(a[n][i] == doctest::Approx(-0.5 * std::cos(t) * std::sin(kz * g.z(i)))
                             .epsilon(5e-3)
                             .scale(1.0));
}
