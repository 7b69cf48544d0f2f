#include <cmath>

#include "doctest.h"
#include "gpbl/layer.hpp"
#include "gpbl/norms.hpp"
#include "gpbl/wkb.hpp"

using namespace gpbl;

namespace {

WKBExpansion flat_expansion(int m, double eps, const Grid& g, const Grid& zg, int nsteps,
                            double dt) {
    WKBExpansion w;
    w.m = m;
    w.eps = eps;
    w.grid = g;
    w.dt = dt;
    RealField one = RealField::sampled(g, [](double, double) { return 1.0; });
    RealField zero(g), zzero(zg);
    for (int n = 0; n < nsteps; ++n) w.t.push_back(n * dt);
    w.a.assign(m + 2, std::vector<RealField>(nsteps, zero));
    w.a[0].assign(nsteps, one);
    w.phi.assign(m + 3, std::vector<RealField>(nsteps, zero));
    w.A.assign(m + 2, std::vector<RealField>(nsteps, zzero));
    w.Phi.assign(m + 2, std::vector<RealField>(nsteps, zzero));
    return w;
}

}  // namespace

TEST_CASE("rescale_layer samples the fast variable") {
    Grid zg = layer_grid(1.0);
    RealField prof = RealField::sampled(zg, [](double Z, double) { return std::exp(-Z); });

    // generic (non-commensurate) physical grid, eps = 0.1
    Grid g = Grid::line(1.0, 173);
    RealField out = rescale_layer(prof, 0.1, g);
    for (int i = 0; i < g.nz; i += 7)
        CHECK(out[i] == doctest::Approx(std::exp(-g.z(i) / 0.1)).epsilon(1e-4).scale(1.0));

    // zero profile stays zero, zero beyond the profile support
    Grid wide = Grid::line(4.0, 641);
    RealField z0 = rescale_layer(RealField(zg), 0.1, wide);
    for (int i = 0; i < wide.nz; ++i) CHECK(z0[i] == 0.0);
    RealField far = rescale_layer(prof, 0.1, wide);
    for (int i = 0; i < wide.nz; ++i)
        if (wide.z(i) > 2.0) CHECK(far[i] == 0.0);

    // unresolved grid is rejected
    CHECK_THROWS_AS(rescale_layer(prof, 0.1, Grid::line(1.0, 41)), std::invalid_argument);
}

TEST_CASE("rescale_layer hits interpolation accuracy 1e-8 on a smooth profile") {
    Grid zg = layer_grid(1.0);
    RealField prof =
        RealField::sampled(zg, [](double Z, double) { return (1.0 + Z) * std::exp(-2.0 * Z); });
    const double eps = 0.05;
    Grid g = Grid::line(1.0, 337);  // dz < eps/16, incommensurate with the layer nodes
    RealField out = rescale_layer(prof, eps, g);
    double sup = 0.0;
    for (int i = 0; i < g.nz; ++i) {
        const double Z = g.z(i) / eps;
        sup = std::max(sup, std::abs(out[i] - (1.0 + Z) * std::exp(-2.0 * Z)));
    }
    CHECK(sup <= 1e-8);
}

TEST_CASE("two-term assembly evaluates the expansion literally") {
    // a = 1 + eps (0.3 + [e^{-Z}]) at z = 0.1, eps = 0.1
    Grid g = Grid::line(1.0, 161);
    Grid zg = layer_grid(1.0);
    WKBExpansion w = flat_expansion(0, 0.1, g, zg, 1, 0.01);
    w.a[1][0] = RealField::sampled(g, [](double, double) { return 0.3; });
    w.A[1][0] = RealField::sampled(zg, [](double Z, double) { return std::exp(-Z); });
    w.validate();
    Assembled out = assemble(w, 0);
    const int iz = 16;  // z = 0.1
    REQUIRE(g.z(iz) == doctest::Approx(0.1));
    CHECK(out.a[iz] == doctest::Approx(1.0 + 0.1 * (0.3 + std::exp(-1.0))).epsilon(1e-7));
    for (int i = 0; i < g.nz; ++i) CHECK(out.phi[i] == 0.0);

    // layer phase enters shifted by one order
    w.Phi[0][0] = RealField::sampled(zg, [](double Z, double) { return std::exp(-2.0 * Z); });
    Assembled out2 = assemble(w, 0);
    CHECK(out2.phi[iz] == doctest::Approx(0.1 * std::exp(-2.0)).epsilon(1e-7));
}

TEST_CASE("validate rejects ragged hierarchies") {
    Grid g = Grid::line(1.0, 161);
    Grid zg = layer_grid(1.0);
    WKBExpansion w = flat_expansion(0, 0.1, g, zg, 2, 0.01);
    w.validate();
    w.phi.pop_back();
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
}

TEST_CASE("gp_apply on a real constant") {
    Grid g = Grid::line(1.0, 33);
    ComplexField c = ComplexField::sampled(g, [](double, double) { return 1.3; });
    ComplexField out = gp_apply(c, c, c, 0.01, 0.2);
    const double want = -(1.3 * 1.3 - 1.0) * 1.3;
    for (int i = 0; i < g.nz; ++i) {
        CHECK(out[i].real() == doctest::Approx(want).epsilon(1e-12));
        CHECK(out[i].imag() == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("to_psi is the polar map") {
    Grid g = Grid::line(1.0, 65);
    RealField a = RealField::sampled(g, [](double z, double) { return 1.0 + 0.1 * z; });
    RealField phi = RealField::sampled(g, [](double z, double) { return 0.3 * z; });
    ComplexField psi = to_psi(a, phi, 0.5);
    for (int i = 0; i < g.nz; ++i) {
        CHECK(std::abs(psi[i]) == doctest::Approx(a[i]).epsilon(1e-14));
        CHECK(psi[i].real() == doctest::Approx(a[i] * std::cos(phi[i] / 0.5)).epsilon(1e-14));
        CHECK(psi[i].imag() == doctest::Approx(a[i] * std::sin(phi[i] / 0.5)).epsilon(1e-14));
    }
}

TEST_CASE("flat hierarchy has vanishing residuals") {
    Grid g = Grid::line(1.0, 81);  // dz = 0.0125 = eps/16
    Grid zg = layer_grid(1.0);
    WKBExpansion w = flat_expansion(0, 0.2, g, zg, 4, 0.01);
    ResidualRecord rec = residuals(w, 1);
    CHECK(rec.norm_gp_l2 == doctest::Approx(0.0).epsilon(1e-13).scale(1.0));
    CHECK(rec.norm_Ra_l2 == doctest::Approx(0.0).epsilon(1e-13).scale(1.0));
    CHECK(rec.norm_Rphi_l2 == doctest::Approx(0.0).epsilon(1e-13).scale(1.0));
    CHECK(rec.identity_gap_sup <= 1e-13);
    CHECK(rec.stencil_tol >= 0.0);
    CHECK_THROWS_AS(residuals(w, 0), std::invalid_argument);
    CHECK_THROWS_AS(residuals(w, 3), std::invalid_argument);
}

TEST_CASE("identity gap stays within the stencil tolerance on smooth data") {
    // smooth, slowly varying pair: the discrete identity holds to truncation error
    const double eps = 0.2;
    Grid g = Grid::line(1.0, 161);
    Grid zg = layer_grid(1.0);
    WKBExpansion w = flat_expansion(0, eps, g, zg, 4, 0.005);
    for (int n = 0; n < 4; ++n) {
        const double t = w.t[n];
        w.a[0][n] = RealField::sampled(
            g, [&](double z, double) { return 1.0 + 0.05 * std::sin(z + t); });
        w.phi[0][n] = RealField::sampled(
            g, [&](double z, double) { return 0.05 * std::cos(2.0 * z - t); });
    }
    ResidualRecord rec = residuals(w, 1);
    CHECK(rec.identity_gap_sup <= 10.0 * rec.stencil_tol);
    CHECK(rec.stencil_tol > 0.0);
}
