#pragma once

#include "gpbl/grid.hpp"

namespace gpbl {

/// The full hierarchy backing the order-m uniformly valid approximation.
/// Outer members live on the physical grid, layer members on a shared
/// fast-variable grid; Phi[i] stores the order-(i+1) layer phase (the order-0
/// one is structurally zero).
struct WKBExpansion {
    int m = 0;
    double eps = 0.1;
    Grid grid;
    double dt = 0.0;
    std::vector<double> t;
    std::vector<std::vector<RealField>> a;    // a[j][step],   j = 0..m+1
    std::vector<std::vector<RealField>> phi;  // phi[j][step], j = 0..m+2
    std::vector<std::vector<RealField>> A;    // A[j][step],   j = 0..m+1 (Z grid)
    std::vector<std::vector<RealField>> Phi;  // Phi[i][step] = Phi_{i+1}, i = 0..m+1

    int steps() const { return static_cast<int>(t.size()); }
    void validate() const;
};

/// Samples a fast-variable profile at Z = z/eps by monotone cubic
/// interpolation; zero beyond eps * Z_max. Requires dz <= eps/16.
RealField rescale_layer(const RealField& profile, double eps, const Grid& grid);

struct Assembled {
    RealField a, phi;
};

/// a^{eps,m} = sum eps^j (a_j + [A_j]), phi^{eps,m} = sum eps^j phi_j
/// + sum_{j>=1} eps^j [Phi_j].
Assembled assemble(const WKBExpansion& w, int step);

/// a e^{i phi / eps}.
ComplexField to_psi(const RealField& a, const RealField& phi, double eps);

/// i eps d_t Psi + (eps^2/2) Lap Psi - (|Psi|^2 - 1) Psi with a centered time
/// derivative from the step triple.
ComplexField gp_apply(const ComplexField& psi_prev, const ComplexField& psi_cur,
                      const ComplexField& psi_next, double dt, double eps);

struct ResidualRecord {
    RealField R_a, R_phi;  // hydrodynamic residuals of the assembled pair
    ComplexField gp;       // direct GP residual of Psi^{a,m}
    double norm_gp_l2 = 0.0;
    double norm_Ra_l2 = 0.0;
    double norm_Rphi_l2 = 0.0;
    double identity_gap_sup = 0.0;  // |gp - (-a R_phi + (eps^2/2) Lap a + i eps R_a) e^{i phi/eps}|
    double stencil_tol = 0.0;       // truncation-error scale for the gap
};

/// Residuals at an interior time step (needs both neighbors).
ResidualRecord residuals(const WKBExpansion& w, int step);

}  // namespace gpbl
