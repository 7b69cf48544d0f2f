#pragma once

#include <string>

#include "gpbl/grid.hpp"

namespace gpbl {

struct CflError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DensityFloorError : std::runtime_error {
    DensityFloorError(const std::string& msg, double t) : std::runtime_error(msg), t_bad(t) {}
    double t_bad;
};

struct LimitState {
    double t = 0.0;
    RealField phi0;
    RealField dphi0_dt;
    RealField a0;
    RealField rho0;
};

/// Trajectory of the order-0 phase under the second-order wave form of the
/// limit system, with phi0 = 0 on both z-boundary rows at every step.
struct LimitTrajectory {
    Grid grid;
    double dt = 0.0;
    RealField a00;    // initial amplitude
    RealField phi00;  // initial phase
    RealField phi01;  // initial phase velocity, 1 - a00^2 - |grad phi00|^2/2
    std::vector<double> t;
    std::vector<RealField> phi;       // one per step
    std::vector<RealField> dphi_dt;   // centered in time (one-sided at ends)

    int steps() const { return static_cast<int>(t.size()); }
    LimitState state(int k) const;
    /// index of the step closest to time tq (requires uniform dt coverage)
    int step_at(double tq) const;
};

struct LimitOptions {
    double rho_min = 0.25;
    double cfl = 0.4;        // refuse dt > cfl * min spacing
    double delta_max = 0.2;  // admissible data amplitude
};

/// Integrates d_t^2 phi - Lap phi + grad phi . grad d_t phi
///            + div((d_t phi + |grad phi|^2/2) grad phi) = 0
/// with phi = 0 on z = 0 and z = z_max.
LimitTrajectory solve_phi0(const RealField& phi00, const RealField& a00, double T,
                           double dt, const LimitOptions& opts = {});

/// rho0 = 1 - d_t phi0 - |grad phi0|^2 / 2 and a0 = sqrt(rho0).
/// Throws DensityFloorError when min rho0 <= rho_min.
std::pair<RealField, RealField> recover_density(const RealField& phi0,
                                                const RealField& dphi0_dt,
                                                double t = 0.0, double rho_min = 0.25);

/// Discrete tangential energy: sum over l < s of the squared L2 norms of
/// d_t T^l phi and grad T^l phi with T = (d_t, grad_y). Monitoring only.
double energy_tan(const LimitTrajectory& traj, int step, int s);

/// One snapshot CSV per saved step plus an index CSV `step,t,min_rho,E1tan`.
void export_trajectory(const LimitTrajectory& traj, const std::string& dir,
                       int save_every = 1);

}  // namespace gpbl
