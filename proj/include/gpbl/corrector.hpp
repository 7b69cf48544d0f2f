#pragma once

#include "gpbl/limit_system.hpp"

namespace gpbl {

/// Order-0 coefficient fields backing the linear wave operator, one record
/// per time step of the limit solve.
struct Background {
    Grid grid;
    double dt = 0.0;
    std::vector<double> t;
    std::vector<RealField> phi0, dphi0_dt, a0, rho0;

    static Background from_trajectory(const LimitTrajectory& traj);
    int steps() const { return static_cast<int>(t.size()); }
};

/// P(phi0, D) phi at time step `step`, with d_t phi from the centered triple
/// (phi_prev, phi_cur, phi_next):
///   d_t^2 phi - div(rho0 grad phi) + 2 grad phi0 . grad d_t phi
///   + div((grad phi0 . grad phi) grad phi0) + grad d_t phi0 . grad phi
///   + Lap phi0 d_t phi
RealField apply_P(const Background& bg, int step, const RealField& phi_prev,
                  const RealField& phi_cur, const RealField& phi_next);

struct WaveSolution {
    std::vector<double> t;
    std::vector<RealField> phi;
    std::vector<RealField> dphi_dt;
};

/// Leapfrog integration of P(phi0, D) phi = f with phi(z=0) = g(t) injected
/// into the boundary row, phi(z_max) = 0. `forcing` and `gbc` may be empty
/// (read as zero); otherwise one entry per background step
/// (gbc[step][iy]).
WaveSolution solve_linear_wave(const Background& bg,
                               const std::vector<RealField>& forcing,
                               const std::vector<std::vector<double>>& gbc,
                               const RealField& phi_init,
                               const RealField& dphi_init,
                               const LimitOptions& opts = {});

struct CorrectorPair {
    int order = 1;  // 1 or k+2
    std::vector<double> t;
    std::vector<RealField> a, phi, dphi_dt;
};

struct CorrectorInputs {
    RealField a_in, phi_in;                      // initial data for the new order
    std::vector<std::vector<double>> Phi_trace;  // layer phase trace at Z = 0
                                                 // per step (empty -> zero)
};

/// Order k+2 corrector (k = -1 gives the order-1 pair). `lower` holds the
/// previously built pairs for orders 1..k+1 in order.
CorrectorPair build_corrector(int k, const Background& bg,
                              const std::vector<CorrectorPair>& lower,
                              const CorrectorInputs& in);

/// a_new = (h - d_t phi - grad phi0 . grad phi) / (2 a0) per step; `h` may be
/// empty (order-1 case) or hold (Lap a_k + g^phi_{k+1})/(2 a0) per step.
std::vector<RealField> recover_amplitude(const Background& bg,
                                         const WaveSolution& sol,
                                         const std::vector<RealField>& h);

/// Snapshot CSVs `phi<order>_<step>.csv`, `a<order>_<step>.csv` + index.
void export_corrector(const CorrectorPair& p, const std::string& dir,
                      int save_every = 1);

}  // namespace gpbl
