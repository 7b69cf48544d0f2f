#include <cmath>
#include <cstdio>
#include <numbers>

#include "doctest.h"
#include "gpbl/csv_io.hpp"
#include "gpbl/norms.hpp"
#include "gpbl/stencil.hpp"
#include "gpbl/trace.hpp"

using namespace gpbl;

TEST_CASE("grid factories and indexing") {
    Grid g = Grid::line(2.0, 5);
    CHECK(g.dz() == doctest::Approx(0.5));
    CHECK(g.nodes() == 5);
    CHECK(g.z(3) == doctest::Approx(1.5));
    CHECK_FALSE(g.has_y());

    Grid s = Grid::strip(1.0, 3, 2.0, 4);
    CHECK(s.dy() == doctest::Approx(0.5));
    CHECK(s.nodes() == 12);
    CHECK(s.idx(2, 3) == 11);

    CHECK_THROWS_AS(Grid::line(-1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(Grid::line(1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(Grid::strip(1.0, 3, 0.0, 4), std::invalid_argument);
}

TEST_CASE("field sampling and arithmetic") {
    Grid g = Grid::line(1.0, 11);
    RealField f = RealField::sampled(g, [](double z, double) { return z * z; });
    CHECK(f.at(5) == doctest::Approx(0.25));
    RealField h = f + f;
    CHECK(h.at(5) == doctest::Approx(0.5));
    RealField d = 3.0 * f - f;
    CHECK(d.at(10) == doctest::Approx(2.0));
    RealField p = f * f;
    CHECK(p.at(10) == doctest::Approx(1.0));
}

TEST_CASE("stencils exact on low-order polynomials including boundary rows") {
    Grid g = Grid::line(2.0, 41);
    RealField f = RealField::sampled(g, [](double z, double) { return z * z * z - 2.0 * z; });
    RealField lap = laplacian(f);
    for (int i = 0; i < g.nz; ++i)
        CHECK(lap[i] == doctest::Approx(6.0 * g.z(i)).epsilon(1e-10));
    // gradient rows (centered and one-sided) are exact on quadratics
    RealField q = RealField::sampled(g, [](double z, double) { return z * z + z; });
    RealField gq = gradient_z(q);
    for (int i = 0; i < g.nz; ++i)
        CHECK(gq[i] == doctest::Approx(2.0 * g.z(i) + 1.0).epsilon(1e-12));
}

TEST_CASE("stencil Richardson ratio is 4 on smooth data") {
    auto err = [](int nz) {
        Grid g = Grid::line(3.0, nz);
        RealField f = RealField::sampled(g, [](double z, double) { return std::sin(z); });
        RealField lap = laplacian(f);
        double e = 0.0;
        for (int i = 1; i < g.nz - 1; ++i)
            e = std::max(e, std::abs(lap[i] + std::sin(g.z(i))));
        return e;
    };
    const double ratio = err(101) / err(201);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("tangential gradient: periodic, second order") {
    auto err = [](int ny) {
        Grid g = Grid::strip(1.0, 3, 2.0 * std::numbers::pi, ny);
        RealField f = RealField::sampled(g, [](double, double y) { return std::sin(y); });
        RealField gy = gradient_y(f);
        double e = 0.0;
        for (int iy = 0; iy < ny; ++iy) e = std::max(e, std::abs(gy.at(1, iy) - std::cos(g.y(iy))));
        return e;
    };
    CHECK(err(64) / err(128) == doctest::Approx(4.0).epsilon(0.1));
    // zero on line grids
    Grid line = Grid::line(1.0, 5);
    RealField f = RealField::sampled(line, [](double z, double) { return z; });
    RealField gy = gradient_y(f);
    for (int i = 0; i < f.size(); ++i) CHECK(gy[i] == 0.0);
}

TEST_CASE("boundary traces: exact on cubics, fourth order on exp(-z)") {
    // cubic data: every stencil is exact up to round-off amplified by dz^-j
    Grid g = Grid::line(1.0, 101);
    RealField c = RealField::sampled(
        g, [](double z, double) { return z * z * z - 2.0 * z * z + 3.0 * z - 1.0; });
    TraceRecord rec = boundary_trace(c, 4);
    const double want[5] = {-1.0, 3.0, -4.0, 6.0, 0.0};
    const double tol[5] = {1e-13, 1e-11, 1e-9, 1e-7, 1e-5};
    for (int j = 0; j <= 4; ++j)
        CHECK(rec.value(j) == doctest::Approx(want[j]).epsilon(tol[j]).scale(1.0));

    // smooth data: fourth-order convergence for the low derivatives, measured
    // on coarse grids where truncation still dominates round-off
    auto err = [](int nz) {
        Grid gg = Grid::line(1.0, nz);
        RealField f = RealField::sampled(gg, [](double z, double) { return std::exp(-z); });
        TraceRecord r = boundary_trace(f, 2);
        double e = 0.0;
        for (int j = 0; j <= 2; ++j)
            e = std::max(e, std::abs(r.value(j) - (j % 2 ? -1.0 : 1.0)));
        return e;
    };
    CHECK(err(51) < 1e-4);
    CHECK(err(26) / err(51) == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("norms: analytic values, homogeneity, triangle inequality") {
    Grid g = Grid::line(4.0, 401);
    RealField one = RealField::sampled(g, [](double, double) { return 1.0; });
    CHECK(norm(one, NormKind::l2) == doctest::Approx(2.0));
    CHECK(norm(one, NormKind::sup) == doctest::Approx(1.0));

    RealField s = RealField::sampled(g, [](double z, double) { return std::sin(z); });
    CHECK(norm(2.0 * s, NormKind::l2) == doctest::Approx(2.0 * norm(s, NormKind::l2)));
    CHECK(norm(one + s, NormKind::l2) <=
          norm(one, NormKind::l2) + norm(s, NormKind::l2) + 1e-12);

    // ||sin||_{L2[0,4]}^2 = 2 - sin(8)/4
    CHECK(norm(s, NormKind::l2) ==
          doctest::Approx(std::sqrt(2.0 - std::sin(8.0) / 4.0)).epsilon(1e-4));
    // H1 includes the gradient
    CHECK(norm(s, NormKind::h1) > norm(s, NormKind::l2));
}

TEST_CASE("csv round trip is bit-exact") {
    Grid g = Grid::strip(1.0, 7, 0.5, 3);
    RealField f = RealField::sampled(g, [](double z, double y) { return std::sin(3.0 * z) + y / 7.0; });
    write_field_csv("test_roundtrip_real.csv", f);
    RealField back = read_real_field_csv("test_roundtrip_real.csv");
    REQUIRE(back.grid() == g);
    for (int i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);

    ComplexField c = ComplexField::sampled(
        g, [](double z, double y) { return std::complex<double>(z / 3.0, std::cos(y)); });
    write_field_csv("test_roundtrip_cplx.csv", c);
    ComplexField cback = read_complex_field_csv("test_roundtrip_cplx.csv");
    REQUIRE(cback.grid() == g);
    for (int i = 0; i < c.size(); ++i) CHECK(cback[i] == c[i]);

    std::remove("test_roundtrip_real.csv");
    std::remove("test_roundtrip_cplx.csv");
}

TEST_CASE("format_double round-trips doubles") {
    for (double x : {1.0 / 3.0, 1e-17, -2.5e300, 0.1 + 0.2}) {
        CHECK(std::stod(format_double(x)) == x);
    }
}
