#pragma once

#include <memory>

#include "gpbl/grid.hpp"

namespace gpbl {

/// Exact linear flow i eps d_t Psi = -(eps^2/2) Lap Psi on u = Psi - 1,
/// Dirichlet in z (sine basis, DST-I), periodic in y (DFT).
class SineKinetic {
public:
    explicit SineKinetic(const Grid& g);
    ~SineKinetic();
    SineKinetic(const SineKinetic&) = delete;
    SineKinetic& operator=(const SineKinetic&) = delete;

    void advance(ComplexField& psi, double dt, double eps) const;

    /// int |grad(psi - 1)|^2 evaluated exactly in the transform basis.
    double grad_norm_sq(const ComplexField& psi) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Potential half-step, kinetic full step, potential half-step.
void step_strang(ComplexField& psi, double dt, double eps, const SineKinetic& kin);

struct GPOptions {
    double dt = 0.0;  // 0 -> min(0.5 dz^2/eps, 0.1 eps)
    int save_every = 1;
};

struct GPTrajectory {
    double eps = 0.1;
    Grid grid;
    double dt = 0.0;
    std::vector<double> t;
    std::vector<ComplexField> psi;  // one per saved step
    double energy_drift = 0.0;      // max relative drift of the discrete GL
                                    // energy (spectral gradient + trapezoid
                                    // potential), the invariant of the
                                    // semi-discrete flow
    double boundary_drift = 0.0;    // max |Psi(z=0) - 1| over the run

    int steps() const { return static_cast<int>(t.size()); }
    /// index of the saved state closest to time tq
    int step_at(double tq) const;
};

/// Strang-splitting integration; requires dz <= eps/16 and psi_init equal to
/// 1 on the z-boundary rows. Aborts on NaN.
GPTrajectory gp_solve(const ComplexField& psi_init, double T, double eps,
                      const GPOptions& opts = {});

/// int (eps^2/2)|grad Psi|^2 + (1/2)(|Psi|^2 - 1)^2.
double gl_energy(const ComplexField& psi, double eps);

struct Madelung {
    RealField density;     // |Psi|^2
    RealField momentum_z;  // eps Im(conj(Psi) dz Psi)
    RealField momentum_y;
};

Madelung madelung_observables(const ComplexField& psi, double eps);

}  // namespace gpbl
