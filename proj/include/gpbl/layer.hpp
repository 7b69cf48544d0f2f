#pragma once

#include "gpbl/grid.hpp"

namespace gpbl {

/// Boundary traces at one (t, y) point feeding the order-0 layer profiles.
struct LayerInputs {
    double a0bar = 1.0;  // trace of a0 at z = 0
    double v0 = 0.0;     // trace of dz phi0 at z = 0

    void validate() const;  // a0bar > 0, a0bar^2 - v0^2 >= 1/4, |v0| < 1
};

struct C2Result {
    double C2 = 0.0;
    double h0 = 1.0;  // sqrt(a0bar^2 - v0^2)
};

/// C2 = (1 - a0bar^2) / (sqrt(1 - v0^2) + h0)^2.
C2Result compute_C2(const LayerInputs& in);

/// Fast-variable grid [0, Z_max] with Z_max = max(20, 20/h0).
Grid layer_grid(double h0, int nodes_per_unit = 64);

/// Closed-form order-0 amplitude profile at a single Z (decaying branch).
double A0_value(const LayerInputs& in, double Z);

/// A0 sampled on a Z-grid; A0(0) = 1 - a0bar to round-off.
RealField profile_A0(const LayerInputs& in, const Grid& zgrid);

/// Phi1(Z) = -v0 * int_Z^inf A0(A0 + 2 a0bar)/(A0 + a0bar)^2, quadrature on
/// [Z, Z_max] plus an analytic e^{-2 h0 Z} tail estimate.
RealField profile_Phi1(const LayerInputs& in, const RealField& A0);

/// dZ Phi1 from the conservation law
/// (A0 + a0bar)^2 (dZ Phi1 + v0) = a0bar^2 v0.
RealField dZ_Phi1(const LayerInputs& in, const RealField& A0);

struct Stiffness {
    RealField g;
    double min_g = 0.0;
};

/// g = 6 A0^2 + 12 a0bar A0 + 4 a0bar^2 + 2 v0 dZPhi1 + (dZPhi1)^2
///     - 4 a0bar^4 v0^2 / (A0 + a0bar)^4.
Stiffness stiffness_g(const LayerInputs& in, const RealField& A0);

/// Order-j profile pair with an exponential-decay certificate.
struct LayerProfile {
    RealField A;    // A_j(Z)
    RealField Phi;  // Phi_{j+1}(Z)
    double gamma = 1.0;
    double decay_const = 0.0;  // sup_Z e^{gamma Z} |A(Z)|
    double tail_bound = 0.0;   // truncation error estimate at Z_max
};

/// sup_Z e^{gamma Z} |f(Z)|.
double decay_constant(const RealField& f, double gamma = 1.0);

/// I(Z) = int_Z^{Z_max} f dZ' (trapezoid) + f(Z_max)/decay_rate tail estimate.
RealField tail_integral(const RealField& f, double decay_rate);

/// Solves dZ^2 A = g A + Gt with A(0) = -abar and A decaying, via the shift
/// At = A + e^{-3Z} abar and a tridiagonal solve. Requires min g > 2.
RealField solve_layer_bvp(const RealField& g, const RealField& Gt, double abar);

struct PhiPair {
    RealField Phi;   // Phi_{k+2}
    RealField dPhi;  // dZ Phi_{k+2}
};

/// dZ Phi_{k+2} = -2 a0bar^2 v0 A_{k+1}/(A0+a0bar)^3
///                + 2 (A0+a0bar)^{-2} int_Z^inf (A0+a0bar) F_k,
/// then Phi_{k+2}(Z) = -int_Z^inf dZ Phi_{k+2} with Phi_{k+2}(inf) = 0.
PhiPair compute_Phi_kp2(const LayerInputs& in, const RealField& A0,
                        const RealField& A_kp1, const RealField& F_k);

/// Everything the order-k source sums consume at one (t, y) point.
/// tr_*[l][j] holds the one-sided z-derivative traces dz^j of order-l outer
/// fields at z = 0. Layer phases are stored with Phi[i] = Phi_{i+1}; the
/// order-0 phase is structurally zero and has no storage. The gy_*/ly_*
/// members carry tangential first/second derivatives of the same data and
/// stay empty for y-homogeneous data.
struct LayerTimeSlice {
    double t = 0.0;
    std::vector<std::vector<double>> tr_a, tr_phi;
    std::vector<std::vector<double>> dt_tr_phi;  // d_t of tr_phi entries
    std::vector<RealField> A;                    // A[l] = A_l
    std::vector<RealField> Phi;                  // Phi[i] = Phi_{i+1}
    std::vector<RealField> dt_A;                 // d_t A_l
    std::vector<RealField> dt_Phi;               // d_t Phi_{i+1}

    std::vector<std::vector<double>> gy_tr_a, gy_tr_phi, ly_tr_phi;
    std::vector<RealField> gy_A, ly_A;
    std::vector<RealField> gy_Phi, ly_Phi;
};

struct SourceTerms {
    RealField F, G, Gtilde;
};

/// Literal evaluation of the order-k multi-index source sums, including the
/// Z^j/j! weights and the tangential -Lap_h A_{k-1}/2 term. Throws when the
/// slice lacks a required hierarchy member or trace order.
SourceTerms source_terms(int k, const LayerTimeSlice& slice);

/// CSV `Z,A,Phi` plus a metadata JSON (a0bar, v0, h0, C2, gamma, decay
/// constant, tail bound).
void export_profile(const std::string& csv_path, const std::string& json_path,
                    const LayerProfile& p, const LayerInputs& in);

}  // namespace gpbl
