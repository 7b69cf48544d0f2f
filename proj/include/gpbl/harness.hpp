#pragma once

#include <map>

#include "gpbl/gp_solver.hpp"
#include "gpbl/wkb.hpp"

namespace gpbl {

struct ScenarioConfig {
    double delta = 0.05;
    double bump_lo = 1.0, bump_hi = 2.0;
    double z_max = 8.0;
    double T = 0.5;
    int order = 1;
    std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
    std::string out_dir = "out";

    static ScenarioConfig from_file(const std::string& path);
    static ScenarioConfig from_string(const std::string& text);  // flat key = value
    void validate() const;

    /// Shared finest grid: dz <= min(eps)/16, node count rounded so the
    /// interior sine transform has a friendly factorization.
    Grid make_grid() const;
    /// Hierarchy time intervals: multiple of 4, CFL 0.4 against make_grid().
    int hierarchy_intervals() const;
    /// Data-size scalar: L2 norm of (a00 - 1, grad phi00) on make_grid().
    double data_size() const;
};

/// Smooth bump supported on [bump_lo, bump_hi], peak value 1.
double bump(const ScenarioConfig& cfg, double z);

/// Builds the full expansion hierarchy for cfg.order on the shared grid
/// (independent of eps; set .eps before assembling).
WKBExpansion build_hierarchy(const ScenarioConfig& cfg);

struct WDecomp {
    ComplexField w;   // e^{-i phi/eps} Psi - a
    RealField wr, wi;
    double boundary_sup = 0.0;  // max |w| on the z = 0 row
};

WDecomp error_decomposition(const ComplexField& psi, const Assembled& approx, double eps);

/// a (wr^2 + wi^2) + w (wr^2 + wi^2 + 2 a wr).
ComplexField q_nonlinearity(const ComplexField& w, const RealField& a);

struct SlopeFit {
    double slope = 0.0, intercept = 0.0, residual = 0.0;
};

/// Least squares on (log eps, log value); requires positive values.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& pts);

struct ErrorRecord {
    double eps = 0.0, t = 0.0;
    std::map<std::string, double> norms;  // norm_kind -> value
};

struct SlopeEntry {
    double slope = 0.0, target = 0.0, tol = 0.0;
    bool pass = false;
    bool na = false;  // fewer than 3 eps values, or errors at round-off level
};

struct ConvergenceReport {
    int m = 0;
    double data_size = 0.0;  // scenario data-size scalar (0 when rebuilt from CSV)
    std::vector<double> eps;
    std::vector<ErrorRecord> records;
    std::map<std::string, SlopeEntry> slopes;
    bool all_pass = false;
};

/// Norm kinds measured per (eps, t) and their target slopes for order m.
const std::vector<std::string>& norm_kinds();
SlopeEntry slope_target(const std::string& kind, int m);

/// Full sweep: hierarchy once, GP per eps, errors at t in {T/2, T}; writes
/// errors.csv, slope_<kind>.dat, report.json into cfg.out_dir.
ConvergenceReport run_convergence(const ScenarioConfig& cfg);

/// Recomputes slopes/report.json (and slope files) from an errors.csv.
ConvergenceReport report_from_errors(const std::string& errors_csv, int m,
                                     const std::string& out_dir);

void write_report_files(const ConvergenceReport& rep, const std::string& out_dir);

}  // namespace gpbl
