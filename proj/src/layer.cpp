#include "gpbl/layer.hpp"

#include <cmath>
#include <fstream>

#include "gpbl/csv_io.hpp"
#include "gpbl/stencil.hpp"
#include "json.hpp"

namespace gpbl {

void LayerInputs::validate() const {
    if (!(a0bar > 0.0)) throw std::invalid_argument("layer inputs: a0bar must be positive");
    if (!(std::abs(v0) < 1.0)) throw std::invalid_argument("layer inputs: |v0| must be < 1");
    if (a0bar * a0bar - v0 * v0 < 0.25)
        throw std::invalid_argument("layer inputs: a0bar^2 - v0^2 < 1/4");
}

C2Result compute_C2(const LayerInputs& in) {
    in.validate();
    C2Result r;
    r.h0 = std::sqrt(in.a0bar * in.a0bar - in.v0 * in.v0);
    const double s = std::sqrt(1.0 - in.v0 * in.v0) + r.h0;
    r.C2 = (1.0 - in.a0bar * in.a0bar) / (s * s);
    return r;
}

Grid layer_grid(double h0, int nodes_per_unit) {
    const double z_max = std::max(20.0, 20.0 / h0);
    const int n = static_cast<int>(std::lround(z_max * nodes_per_unit)) + 1;
    return Grid::line(z_max, n);
}

double A0_value(const LayerInputs& in, double Z) {
    const C2Result c2 = compute_C2(in);
    const double c = c2.C2 * std::exp(-2.0 * c2.h0 * Z);
    if (c >= 1.0) throw std::invalid_argument("A0: profile denominator 1 - C2 e^{-2 h0 Z} <= 0");
    const double om = 1.0 - c;
    const double B0 = c2.h0 * (1.0 + c) / om;
    // B0^2 - h0^2 = 4 h0^2 c / (1-c)^2, kept in this cancellation-free form
    const double B0sq_m_h0sq = 4.0 * c2.h0 * c2.h0 * c / (om * om);
    return B0sq_m_h0sq / (std::sqrt(B0 * B0 + in.v0 * in.v0) + in.a0bar);
}

RealField profile_A0(const LayerInputs& in, const Grid& zgrid) {
    RealField A(zgrid);
    for (int i = 0; i < zgrid.nz; ++i) A[i] = A0_value(in, zgrid.z(i));
    return A;
}

RealField dZ_Phi1(const LayerInputs& in, const RealField& A0) {
    RealField d(A0.grid());
    for (int i = 0; i < d.size(); ++i) {
        const double s = A0[i] + in.a0bar;
        d[i] = in.a0bar * in.a0bar * in.v0 / (s * s) - in.v0;
    }
    return d;
}

double decay_constant(const RealField& f, double gamma) {
    const Grid& g = f.grid();
    double m = 0.0;
    for (int i = 0; i < g.nz; ++i) m = std::max(m, std::exp(gamma * g.z(i)) * std::abs(f[i]));
    return m;
}

RealField tail_integral(const RealField& f, double decay_rate) {
    if (!(decay_rate > 0.0)) throw std::invalid_argument("tail_integral: decay rate must be positive");
    const Grid& g = f.grid();
    const double dz = g.dz();
    RealField I(g);
    I[g.nz - 1] = f[g.nz - 1] / decay_rate;  // analytic e^{-r Z} tail estimate
    for (int i = g.nz - 2; i >= 0; --i) I[i] = I[i + 1] + 0.5 * dz * (f[i] + f[i + 1]);
    return I;
}

RealField profile_Phi1(const LayerInputs& in, const RealField& A0) {
    const C2Result c2 = compute_C2(in);
    RealField integrand(A0.grid());
    for (int i = 0; i < integrand.size(); ++i) {
        const double s = A0[i] + in.a0bar;
        integrand[i] = A0[i] * (A0[i] + 2.0 * in.a0bar) / (s * s);
    }
    // Phi1(Z) = -int_Z^inf dZ_Phi1 with dZ_Phi1 = a^2 v/(A+a)^2 - v
    //         = +v int_Z^inf A (A + 2a) / (A + a)^2
    RealField tail = tail_integral(integrand, 2.0 * c2.h0);
    return in.v0 * tail;
}

Stiffness stiffness_g(const LayerInputs& in, const RealField& A0) {
    RealField dPhi1 = dZ_Phi1(in, A0);
    Stiffness st;
    st.g = RealField(A0.grid());
    st.min_g = 1e300;
    const double a = in.a0bar;
    for (int i = 0; i < A0.size(); ++i) {
        const double s = A0[i] + a;
        st.g[i] = 6.0 * A0[i] * A0[i] + 12.0 * a * A0[i] + 4.0 * a * a +
                  2.0 * in.v0 * dPhi1[i] + dPhi1[i] * dPhi1[i] -
                  4.0 * std::pow(a, 4) * in.v0 * in.v0 / std::pow(s, 4);
        st.min_g = std::min(st.min_g, st.g[i]);
    }
    return st;
}

RealField solve_layer_bvp(const RealField& g, const RealField& Gt, double abar) {
    const Grid& zg = g.grid();
    if (!(Gt.grid() == zg)) throw std::invalid_argument("solve_layer_bvp: grid mismatch");
    double min_g = g[0];
    for (int i = 1; i < g.size(); ++i) min_g = std::min(min_g, g[i]);
    if (min_g <= 2.0)
        throw std::runtime_error("solve_layer_bvp: coercivity failure, min g = " +
                                 format_double(min_g));

    // shift At = A + e^{-3Z} abar homogenizes the boundary rows:
    //   At'' = g At + R,  R = Gt + (9 - g) e^{-3Z} abar,  At(0) = At(Z_max) = 0,
    // discretized with the fourth-order Numerov stencil
    //   At_{i-1} - 2 At_i + At_{i+1} = (dz^2/12)(f_{i-1} + 10 f_i + f_{i+1})
    const int n = zg.nz;
    const double q = zg.dz() * zg.dz() / 12.0;
    std::vector<double> R(n);
    for (int i = 0; i < n; ++i)
        R[i] = Gt[i] + (9.0 - g[i]) * std::exp(-3.0 * zg.z(i)) * abar;
    std::vector<double> sub(n), diag(n), sup(n), rhs(n);
    for (int i = 1; i < n - 1; ++i) {
        sub[i] = 1.0 - q * g[i - 1];
        diag[i] = -2.0 - 10.0 * q * g[i];
        sup[i] = 1.0 - q * g[i + 1];
        rhs[i] = q * (R[i - 1] + 10.0 * R[i] + R[i + 1]);
    }
    // Thomas sweep on the interior unknowns (boundary values are zero)
    sup[1] /= diag[1];
    rhs[1] /= diag[1];
    for (int i = 2; i < n - 1; ++i) {
        const double m = diag[i] - sub[i] * sup[i - 1];
        sup[i] /= m;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / m;
    }
    RealField A(zg);
    double at_next = 0.0;
    for (int i = n - 2; i >= 1; --i) {
        const double at = rhs[i] - sup[i] * at_next;
        A[i] = at - std::exp(-3.0 * zg.z(i)) * abar;
        at_next = at;
    }
    A[0] = -abar;
    A[n - 1] = -std::exp(-3.0 * zg.z(n - 1)) * abar;
    return A;
}

PhiPair compute_Phi_kp2(const LayerInputs& in, const RealField& A0,
                        const RealField& A_kp1, const RealField& F_k) {
    const Grid& zg = A0.grid();
    if (!(A_kp1.grid() == zg) || !(F_k.grid() == zg))
        throw std::invalid_argument("compute_Phi_kp2: grid mismatch");
    RealField wF(zg);
    for (int i = 0; i < wF.size(); ++i) wF[i] = (A0[i] + in.a0bar) * F_k[i];
    RealField I = tail_integral(wF, 1.0);

    PhiPair p;
    p.dPhi = RealField(zg);
    for (int i = 0; i < zg.nz; ++i) {
        const double s = A0[i] + in.a0bar;
        p.dPhi[i] = -2.0 * in.a0bar * in.a0bar * in.v0 * A_kp1[i] / (s * s * s) +
                    2.0 * I[i] / (s * s);
    }
    RealField minus_phi = tail_integral(p.dPhi, 1.0);
    p.Phi = -1.0 * minus_phi;
    return p;
}

namespace {

// indexed access with explicit failure on missing hierarchy members;
// the tangential containers are optional and read as zero when empty
struct SliceView {
    const LayerTimeSlice& s;
    Grid zg;
    RealField zero;
    std::vector<RealField> dZA, dZPhi, dZ2Phi;

    explicit SliceView(const LayerTimeSlice& slice) : s(slice) {
        if (s.A.empty()) throw std::invalid_argument("source_terms: no layer amplitudes");
        zg = s.A[0].grid();
        zero = RealField(zg);
        for (const auto& a : s.A) dZA.push_back(gradient_z(a));
        for (const auto& p : s.Phi) {
            dZPhi.push_back(gradient_z(p));
            dZ2Phi.push_back(laplacian(p));
        }
    }

    static double scalar(const std::vector<std::vector<double>>& v, int l, int j,
                         const char* what, bool optional) {
        if (optional && v.empty()) return 0.0;
        if (l < static_cast<int>(v.size()) && j < static_cast<int>(v[l].size())) return v[l][j];
        throw std::invalid_argument(std::string("source_terms: missing trace ") + what +
                                    " order " + std::to_string(l) + " derivative " +
                                    std::to_string(j));
    }
    double tra(int l, int j) const { return scalar(s.tr_a, l, j, "a", false); }
    double trphi(int l, int j) const { return scalar(s.tr_phi, l, j, "phi", false); }
    double dttrphi(int l, int j) const { return scalar(s.dt_tr_phi, l, j, "dt phi", false); }
    double gytra(int l, int j) const { return scalar(s.gy_tr_a, l, j, "dy a", true); }
    double gytrphi(int l, int j) const { return scalar(s.gy_tr_phi, l, j, "dy phi", true); }
    double lytrphi(int l, int j) const { return scalar(s.ly_tr_phi, l, j, "lap_h phi", true); }

    const RealField& pick(const std::vector<RealField>& v, int l, const char* what,
                          bool optional) const {
        if (optional && v.empty()) return zero;
        if (l < static_cast<int>(v.size())) return v[l];
        throw std::invalid_argument(std::string("source_terms: missing profile ") + what +
                                    " order " + std::to_string(l));
    }
    const RealField& A(int l) const { return pick(s.A, l, "A", false); }
    const RealField& dtA(int l) const { return pick(s.dt_A, l, "dt A", false); }
    const RealField& dA(int l) const { return pick(dZA, l, "dZ A", false); }
    const RealField& gyA(int l) const { return pick(s.gy_A, l, "dy A", true); }
    const RealField& lyA(int l) const { return pick(s.ly_A, l, "lap_h A", true); }
    // the order-0 layer phase is structurally zero
    const RealField& Phi(int l) const { return l == 0 ? zero : pick(s.Phi, l - 1, "Phi", false); }
    const RealField& dtPhi(int l) const {
        return l == 0 ? zero : pick(s.dt_Phi, l - 1, "dt Phi", false);
    }
    const RealField& dPhi(int l) const { return l == 0 ? zero : pick(dZPhi, l - 1, "dZ Phi", false); }
    const RealField& d2Phi(int l) const {
        return l == 0 ? zero : pick(dZ2Phi, l - 1, "dZ2 Phi", false);
    }
    const RealField& gyPhi(int l) const { return l == 0 ? zero : pick(s.gy_Phi, l - 1, "dy Phi", true); }
    const RealField& lyPhi(int l) const { return l == 0 ? zero : pick(s.ly_Phi, l - 1, "lap_h Phi", true); }
};

double factorial(int j) {
    double f = 1.0;
    for (int i = 2; i <= j; ++i) f *= i;
    return f;
}

}  // namespace

SourceTerms source_terms(int k, const LayerTimeSlice& slice) {
    SliceView v(slice);
    const Grid& zg = v.zg;
    const int n = zg.nz;
    std::vector<double> Z(n);
    for (int i = 0; i < n; ++i) Z[i] = zg.z(i);
    auto zw = [&](int j, int i) { return std::pow(Z[i], j) / factorial(j); };

    RealField F(zg), G(zg);

    // ---- amplitude-equation source F_k ----
    for (int i = 0; i < n; ++i) F[i] -= v.dtA(k)[i];

    for (int l = 0; l <= k; ++l)  // F_1
        for (int i = 0; i < n; ++i) {
            double t = v.gyPhi(l)[i] * v.gyA(k - l)[i] +
                       0.5 * v.A(l)[i] *
                           (v.lyPhi(k - l)[i] + v.lytrphi(k - l, 0) + v.trphi(k - l, 2)) +
                       v.gytrphi(l, 0) * v.gyA(k - l)[i] + v.gyPhi(l)[i] * v.gytra(k - l, 0) +
                       0.5 * v.tra(l, 0) * v.lyPhi(k - l)[i] +
                       Z[i] * (v.trphi(l, 2) * v.dA(k - l)[i] + v.dPhi(l)[i] * v.tra(k - l, 2)) +
                       0.5 * Z[i] * Z[i] * 0.5 * v.tra(l, 2) * v.d2Phi(k - l)[i];
            F[i] -= t;
        }
    for (int l = 2; l <= k + 1; ++l)  // F_2
        for (int i = 0; i < n; ++i) F[i] -= v.dPhi(l)[i] * v.dA(k + 2 - l)[i];
    for (int l = 1; l <= k; ++l)  // F_3
        for (int i = 0; i < n; ++i)
            F[i] -= 0.5 * (v.A(l)[i] + v.tra(l, 0)) * v.d2Phi(k + 2 - l)[i];
    for (int l = 1; l <= k + 1; ++l)  // F_4
        for (int i = 0; i < n; ++i)
            F[i] -= v.trphi(l, 1) * v.dA(k + 1 - l)[i] + v.dPhi(l)[i] * v.tra(k + 1 - l, 1) +
                    Z[i] * 0.5 * v.tra(k + 1 - l, 1) * v.d2Phi(l)[i];
    for (int l1 = 0; l1 <= k - 1; ++l1) {  // F_5
        const int l2 = k - 1 - l1;
        for (int i = 0; i < n; ++i)
            F[i] += Z[i] * (v.gytrphi(l1, 1) * v.gyA(l2)[i] + v.gyPhi(l1)[i] * v.gytra(l2, 1) +
                            0.5 * v.tra(l1, 1) * v.lyPhi(l2)[i] +
                            0.5 * v.A(l1)[i] * (v.lytrphi(l2, 1) + v.trphi(l2, 3))) +
                    0.5 * Z[i] * Z[i] *
                        (v.trphi(l1, 3) * v.dA(l2)[i] + v.dPhi(l1)[i] * v.tra(l2, 3));
    }
    for (int j = 2; j <= k; ++j)  // F_6
        for (int l1 = 0; l1 <= k - j; ++l1) {
            const int l2 = k - j - l1;
            for (int i = 0; i < n; ++i)
                F[i] -= zw(j, i) * (v.gytrphi(l1, j) * v.gyA(l2)[i] +
                                    v.gyPhi(l1)[i] * v.gytra(l2, j) +
                                    0.5 * v.tra(l1, j) * v.lyPhi(l2)[i] +
                                    0.5 * v.A(l1)[i] * (v.lytrphi(l2, j) + v.trphi(l2, j + 2)));
        }
    for (int j = 2; j <= k + 1; ++j)  // F_7
        for (int l1 = 0; l1 <= k + 1 - j; ++l1) {
            const int l2 = k + 1 - j - l1;
            for (int i = 0; i < n; ++i)
                F[i] -= zw(j, i) *
                        (v.trphi(l1, j + 1) * v.dA(l2)[i] + v.dPhi(l1)[i] * v.tra(l2, j + 1));
        }
    for (int j = 2; j <= k + 2; ++j)  // F_8
        for (int l1 = 0; l1 <= k + 2 - j; ++l1) {
            const int l2 = k + 2 - j - l1;
            for (int i = 0; i < n; ++i) F[i] -= zw(j, i) * 0.5 * v.tra(l1, j) * v.d2Phi(l2)[i];
        }

    // ---- phase-equation source G_k ----
    for (int l1 = 0; l1 <= k; ++l1)  // sum 1
        for (int j = 0; j <= k + 1 - l1; ++j) {
            const int l2 = k + 1 - l1 - j;
            for (int i = 0; i < n; ++i)
                G[i] += zw(j, i) *
                        (v.tra(l1, j) * v.dtPhi(l2)[i] + v.A(l1)[i] * v.dttrphi(l2, j));
        }
    for (int l = 0; l <= k; ++l)  // sum 2
        for (int i = 0; i < n; ++i) G[i] += v.A(l)[i] * v.dtPhi(k + 1 - l)[i];
    const bool tangential = !slice.gy_tr_phi.empty() || !slice.gy_Phi.empty();
    if (tangential)  // sum 3
        for (int l1 = 0; l1 <= k + 1; ++l1)
            for (int l2 = 0; l2 <= k + 1 - l1; ++l2)
                for (int l3 = 0; l3 <= k + 1 - l1 - l2; ++l3)
                    for (int j1 = 0; j1 <= k + 1 - l1 - l2 - l3; ++j1) {
                        const int j2 = k + 1 - l1 - l2 - l3 - j1;
                        for (int i = 0; i < n; ++i)
                            G[i] += zw(j1, i) * zw(j2, i) * v.tra(l1, j1) * v.gytrphi(l2, j2) *
                                    v.gyPhi(l3)[i];
                    }
    for (int l1 = 0; l1 <= k; ++l1)  // sum 4 (full gradients: tangential + z parts)
        for (int l2 = 0; l2 <= k + 1 - l1; ++l2)
            for (int l3 = 0; l3 <= k + 1 - l1 - l2; ++l3)
                for (int j1 = 0; j1 <= k + 1 - l1 - l2 - l3; ++j1) {
                    const int j2 = k + 1 - l1 - l2 - l3 - j1;
                    const double grad_dot_z = v.trphi(l2, j1 + 1) * v.trphi(l3, j2 + 1);
                    const double grad_dot_y = v.gytrphi(l2, j1) * v.gytrphi(l3, j2);
                    const double c = 0.5 * (grad_dot_y + grad_dot_z) +
                                     3.0 * v.tra(l2, j1) * v.tra(l3, j2);
                    for (int i = 0; i < n; ++i) G[i] += zw(j1, i) * zw(j2, i) * v.A(l1)[i] * c;
                }
    for (int l3 = 1; l3 <= k + 1; ++l3)  // sum 5
        for (int l1 = 0; l1 <= k + 2 - l3; ++l1)
            for (int l2 = 0; l2 <= k + 2 - l3 - l1; ++l2)
                for (int j1 = 0; j1 <= k + 2 - l3 - l1 - l2; ++j1) {
                    const int j2 = k + 2 - l3 - l1 - l2 - j1;
                    const double c = v.tra(l1, j1) * v.trphi(l2, j2 + 1);
                    for (int i = 0; i < n; ++i)
                        G[i] += zw(j1, i) * zw(j2, i) * c * v.dPhi(l3)[i];
                }
    if (tangential) {
        for (int l1 = 0; l1 <= k; ++l1)  // sum 6
            for (int l2 = 0; l2 <= k + 1 - l1; ++l2)
                for (int j = 0; j <= k + 1 - l1 - l2; ++j) {
                    const int l3 = k + 1 - l1 - l2 - j;
                    for (int i = 0; i < n; ++i)
                        G[i] += zw(j, i) * v.A(l1)[i] * v.gytrphi(l2, j) * v.gyPhi(l3)[i];
                }
        for (int l1 = 0; l1 <= k + 1; ++l1)  // sum 7
            for (int l2 = 0; l2 <= k + 1 - l1; ++l2)
                for (int j = 0; j <= k + 1 - l1 - l2; ++j) {
                    const int l3 = k + 1 - l1 - l2 - j;
                    for (int i = 0; i < n; ++i)
                        G[i] += zw(j, i) * 0.5 * v.tra(l1, j) * v.gyPhi(l2)[i] * v.gyPhi(l3)[i];
                }
    }
    // sum 8: every layer-amplitude index stays <= k; the order-(k+1) terms
    // are the ones absorbed into the stiffness coefficient
    for (int l1 = 0; l1 <= k; ++l1)
        for (int l2 = 0; l2 <= k - l1; ++l2)
            for (int l3 = 0; l3 <= k - l1 - l2; ++l3) {
                const int j = k + 1 - l1 - l2 - l3;
                for (int i = 0; i < n; ++i)
                    G[i] += zw(j, i) * 3.0 * v.tra(l1, j) * v.A(l2)[i] * v.A(l3)[i];
            }
    for (int l3 = 1; l3 <= k + 1; ++l3)  // sum 9
        for (int l1 = 0; l1 <= std::min(k, k + 2 - l3); ++l1)
            for (int l2 = 0; l2 <= k + 2 - l3 - l1; ++l2) {
                const int j = k + 2 - l3 - l1 - l2;
                for (int i = 0; i < n; ++i)
                    G[i] += zw(j, i) * v.A(l1)[i] * v.trphi(l2, j + 1) * v.dPhi(l3)[i];
            }
    for (int l2 = 1; l2 <= k; ++l2)  // sum 10 (1 <= l2 + l3 <= k+1, layer phases only)
        for (int l3 = 1; l3 <= k + 1 - l2; ++l3)
            for (int l1 = 0; l1 <= k + 3 - l2 - l3; ++l1) {
                const int j = k + 3 - l2 - l3 - l1;
                for (int i = 0; i < n; ++i)
                    G[i] += zw(j, i) * 0.5 * v.tra(l1, j) * v.dPhi(l2)[i] * v.dPhi(l3)[i];
            }
    if (k >= 1) {
        const RealField& lyAkm1 = v.lyA(k - 1);
        for (int i = 0; i < n; ++i) G[i] -= 0.5 * lyAkm1[i];
    }

    // Gtilde_k = 2 G_k + 4 a0bar^2 v0 (A0+a0bar)^{-3} int_Z^inf (A0+a0bar) F_k
    const double a0bar = v.tra(0, 0);
    const double v0 = v.trphi(0, 1);
    RealField wF(zg);
    for (int i = 0; i < n; ++i) wF[i] = (v.A(0)[i] + a0bar) * F[i];
    RealField I = tail_integral(wF, 1.0);
    SourceTerms out;
    out.F = std::move(F);
    out.G = std::move(G);
    out.Gtilde = RealField(zg);
    for (int i = 0; i < n; ++i) {
        const double s = v.A(0)[i] + a0bar;
        out.Gtilde[i] = 2.0 * out.G[i] + 4.0 * a0bar * a0bar * v0 * I[i] / (s * s * s);
    }
    return out;
}

void export_profile(const std::string& csv_path, const std::string& json_path,
                    const LayerProfile& p, const LayerInputs& in) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open for writing: " + csv_path);
    csv << "Z,A,Phi\n";
    const Grid& g = p.A.grid();
    for (int i = 0; i < g.nz; ++i)
        csv << format_double(g.z(i)) << ',' << format_double(p.A[i]) << ','
            << format_double(p.Phi[i]) << '\n';

    const C2Result c2 = compute_C2(in);
    nlohmann::json meta{{"a0bar", in.a0bar},         {"v0", in.v0},
                        {"h0", c2.h0},               {"C2", c2.C2},
                        {"gamma", p.gamma},          {"decay_const", p.decay_const},
                        {"tail_bound", p.tail_bound}};
    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("cannot open for writing: " + json_path);
    js << meta.dump(2) << '\n';
}

}  // namespace gpbl
