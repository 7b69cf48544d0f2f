#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gpbl/harness.hpp"
#include "gpbl/norms.hpp"

using namespace gpbl;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
    ScenarioConfig d = ScenarioConfig::from_string("");
    CHECK(d.delta == 0.05);
    CHECK(d.z_max == 8.0);
    CHECK(d.order == 1);
    CHECK(d.eps.size() == 4);

    ScenarioConfig c = ScenarioConfig::from_string(
        "delta = 0.1\nT = 0.25  # comment\nz_max = 4\norder = 0\neps = 0.4, 0.2, 0.1\n"
        "out_dir = somewhere\n");
    CHECK(c.delta == 0.1);
    CHECK(c.T == 0.25);
    CHECK(c.order == 0);
    REQUIRE(c.eps.size() == 3);
    CHECK(c.eps[1] == 0.2);
    CHECK(c.out_dir == "somewhere");

    CHECK_THROWS_AS(ScenarioConfig::from_string("bogus_key = 1\n"), std::runtime_error);
    CHECK_THROWS_AS(ScenarioConfig::from_string("delta = 0.5\n"), std::runtime_error);
    CHECK_THROWS_AS(ScenarioConfig::from_string("eps = 0.1, 0.2\n"), std::runtime_error);
    CHECK_THROWS_AS(ScenarioConfig::from_string("T = -1\n"), std::runtime_error);
    CHECK_THROWS_AS(ScenarioConfig::from_string("no equals sign"), std::runtime_error);
}

TEST_CASE("bump support and peak") {
    ScenarioConfig cfg;
    CHECK(bump(cfg, 0.0) == 0.0);
    CHECK(bump(cfg, 1.0) == 0.0);
    CHECK(bump(cfg, 2.0) == 0.0);
    CHECK(bump(cfg, 5.0) == 0.0);
    CHECK(bump(cfg, 1.5) == doctest::Approx(1.0));
    CHECK(bump(cfg, 1.2) > 0.0);
    CHECK(bump(cfg, 1.2) < 1.0);
}

TEST_CASE("grid and step sizing respect the resolution contracts") {
    ScenarioConfig cfg = ScenarioConfig::from_string("z_max = 4\neps = 0.4, 0.3, 0.2\nT = 0.1\n");
    Grid g = cfg.make_grid();
    CHECK(g.dz() <= 0.2 / 16.0 + 1e-15);
    CHECK((g.nz - 1) % 16 == 0);
    const int ns = cfg.hierarchy_intervals();
    CHECK(ns % 4 == 0);
    CHECK(cfg.T / ns <= 0.4 * g.dz() + 1e-15);

    CHECK(cfg.data_size() > 0.0);
    ScenarioConfig big = cfg;
    big.delta = 0.1;
    CHECK(big.data_size() == doctest::Approx(2.0 * cfg.data_size()).epsilon(1e-12));
}

TEST_CASE("fit_slope") {
    // exact power law
    std::vector<std::pair<double, double>> pts;
    for (double e : {0.2, 0.1, 0.05, 0.025}) pts.push_back({e, 3.0 * e * e});
    SlopeFit f = fit_slope(pts);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.residual <= 1e-12);

    // two points determine the line exactly
    SlopeFit f2 = fit_slope({{0.2, 0.04}, {0.1, 0.01}});
    CHECK(f2.slope == doctest::Approx(2.0).epsilon(1e-12));

    // +-5% perturbation moves the slope by well under 0.1
    std::vector<std::pair<double, double>> noisy;
    int k = 0;
    for (double e : {0.2, 0.1, 0.05, 0.025})
        noisy.push_back({e, e * e * (1.0 + ((k++ % 2) ? -0.05 : 0.05))});
    CHECK(fit_slope(noisy).slope == doctest::Approx(2.0).epsilon(0.05));

    // rescaling the values shifts only the intercept
    std::vector<std::pair<double, double>> scaled = pts;
    for (auto& p : scaled) p.second *= 17.0;
    CHECK(fit_slope(scaled).slope == doctest::Approx(f.slope).epsilon(1e-12));

    CHECK_THROWS_AS(fit_slope({{0.2, 0.0}, {0.1, 0.01}}), std::invalid_argument);
    CHECK_THROWS_AS(fit_slope({{0.1, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(fit_slope({{0.1, 1.0}, {0.1, 2.0}}), std::invalid_argument);
}

TEST_CASE("error decomposition identities") {
    Grid g = Grid::line(2.0, 129);
    const double eps = 0.3;
    RealField a = RealField::sampled(g, [](double z, double) { return 1.0 + 0.1 * std::sin(z); });
    RealField phi = RealField::sampled(g, [](double z, double) { return 0.2 * std::cos(z); });
    Assembled ap{a, phi};
    ComplexField psi = to_psi(a, phi, eps);

    WDecomp w0 = error_decomposition(psi, ap, eps);
    CHECK(norm(w0.w, NormKind::sup) <= 1e-13);
    CHECK(w0.boundary_sup <= 1e-13);

    // a real amplitude perturbation lands entirely in wr
    RealField eta = RealField::sampled(g, [](double z, double) { return 0.01 * z; });
    ComplexField psi2 = to_psi(a + eta, phi, eps);
    WDecomp w1 = error_decomposition(psi2, ap, eps);
    for (int i = 0; i < g.nz; ++i) {
        CHECK(w1.wr[i] == doctest::Approx(eta[i]).epsilon(1e-12).scale(1.0));
        CHECK(w1.wi[i] == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    }

    Grid other = Grid::line(2.0, 65);
    Assembled bad{RealField(other), RealField(other)};
    CHECK_THROWS_AS(error_decomposition(psi, bad, eps), std::invalid_argument);
}

TEST_CASE("q_nonlinearity closed forms") {
    Grid g = Grid::line(1.0, 17);
    RealField one = RealField::sampled(g, [](double, double) { return 1.0; });
    ComplexField zero(g);
    ComplexField q0 = q_nonlinearity(zero, one);
    for (int i = 0; i < g.nz; ++i) CHECK(std::abs(q0[i]) == 0.0);

    const double beta = 0.3;
    ComplexField ib = ComplexField::sampled(g, [&](double, double) {
        return std::complex<double>(0.0, beta);
    });
    ComplexField q = q_nonlinearity(ib, one);
    for (int i = 0; i < g.nz; ++i) {
        CHECK(q[i].real() == doctest::Approx(beta * beta).epsilon(1e-14));
        CHECK(q[i].imag() == doctest::Approx(beta * beta * beta).epsilon(1e-14));
    }
}

TEST_CASE("slope targets per norm kind") {
    CHECK(slope_target("w_l2", 1).target == 1.0);
    CHECK(slope_target("w_sup", 1).target == 0.0);
    CHECK(slope_target("gradw_sup", 0).target == -1.0);
    CHECK(slope_target("wr_l2", 1).target == 2.0);
    CHECK(slope_target("gp_resid_l2", 0).target == 1.0);
    CHECK_THROWS_AS(slope_target("nope", 0), std::invalid_argument);
    CHECK(norm_kinds().size() == 5);
}

TEST_CASE("report_from_errors marks slopes n/a with too few eps") {
    namespace fs = std::filesystem;
    const std::string dir = "harness_report_na";
    fs::create_directories(dir);
    {
        std::ofstream csv(dir + "/errors.csv");
        csv << "eps,norm_kind,t,value\n";
        for (double e : {0.2, 0.1})
            for (const std::string& kind : norm_kinds())
                csv << e << ',' << kind << ",0.5," << 0.01 * e << '\n';
    }
    ConvergenceReport rep = report_from_errors(dir + "/errors.csv", 1, dir);
    CHECK(rep.eps.size() == 2);
    for (const auto& [kind, entry] : rep.slopes) {
        CHECK(entry.na);
        CHECK(entry.pass);
    }
    CHECK(rep.all_pass);
    CHECK(fs::exists(dir + "/report.json"));
    fs::remove_all(dir);
}

TEST_CASE("report_from_errors recovers slopes from a synthetic sweep") {
    namespace fs = std::filesystem;
    const std::string dir = "harness_report_syn";
    fs::create_directories(dir);
    {
        std::ofstream csv(dir + "/errors.csv");
        csv << "eps,norm_kind,t,value\n";
        for (double e : {0.2, 0.1, 0.05, 0.025})
            for (const std::string& kind : norm_kinds()) {
                const double p = slope_target(kind, 1).target + 0.1;
                csv << e << ',' << kind << ",0.5," << 0.3 * std::pow(e, p) << '\n';
            }
    }
    ConvergenceReport rep = report_from_errors(dir + "/errors.csv", 1, dir);
    for (const std::string& kind : norm_kinds()) {
        const SlopeEntry& entry = rep.slopes.at(kind);
        CHECK_FALSE(entry.na);
        CHECK(entry.slope == doctest::Approx(entry.target + 0.1).epsilon(1e-6));
        CHECK(entry.pass);
    }
    CHECK(rep.all_pass);
    fs::remove_all(dir);
}

TEST_CASE("small convergence sweep runs end to end and is deterministic") {
    namespace fs = std::filesystem;
    ScenarioConfig cfg = ScenarioConfig::from_string(
        "z_max = 4\nT = 0.1\norder = 0\ndelta = 0.05\neps = 0.4, 0.3, 0.2\n"
        "out_dir = harness_smoke_a\n");
    ConvergenceReport rep = run_convergence(cfg);
    CHECK(rep.m == 0);
    CHECK(rep.records.size() == 6);  // 3 eps x 2 times
    for (const ErrorRecord& r : rep.records) {
        CHECK(r.norms.size() == 5);
        for (const auto& [kind, v] : r.norms) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
        }
    }
    CHECK(rep.slopes.size() == 5);
    CHECK(fs::exists("harness_smoke_a/errors.csv"));
    CHECK(fs::exists("harness_smoke_a/report.json"));
    CHECK(fs::exists("harness_smoke_a/slope_w_l2.dat"));

    ScenarioConfig cfg2 = cfg;
    cfg2.out_dir = "harness_smoke_b";
    run_convergence(cfg2);
    CHECK(slurp("harness_smoke_a/errors.csv") == slurp("harness_smoke_b/errors.csv"));
    fs::remove_all("harness_smoke_a");
    fs::remove_all("harness_smoke_b");
}

TEST_CASE("zero-data scenario reports n/a slopes") {
    ScenarioConfig cfg = ScenarioConfig::from_string(
        "z_max = 4\nT = 0.1\norder = 0\ndelta = 0\neps = 0.4, 0.3, 0.2\n"
        "out_dir = harness_zero\n");
    ConvergenceReport rep = run_convergence(cfg);
    for (const auto& [kind, entry] : rep.slopes) {
        CHECK(entry.na);
        CHECK(entry.pass);
    }
    CHECK(rep.all_pass);
    std::filesystem::remove_all("harness_zero");
}
