#include "gpbl/wkb.hpp"

#include <cmath>

#include "gpbl/norms.hpp"
#include "gpbl/stencil.hpp"

namespace gpbl {

void WKBExpansion::validate() const {
    const int ns = steps();
    auto check = [&](const std::vector<std::vector<RealField>>& v, int want, const char* what) {
        if (static_cast<int>(v.size()) != want)
            throw std::invalid_argument(std::string("WKBExpansion: expected ") +
                                        std::to_string(want) + " orders of " + what);
        for (const auto& traj : v)
            if (static_cast<int>(traj.size()) != ns)
                throw std::invalid_argument(std::string("WKBExpansion: ragged trajectory in ") +
                                            what);
    };
    check(a, m + 2, "a");
    check(phi, m + 3, "phi");
    check(A, m + 2, "A");
    check(Phi, m + 2, "Phi");
}

namespace {

// Monotone cubic Hermite interpolant on a uniform grid: fourth-order slope
// estimates passed through a Hyman-style limiter, so resolved monotone data
// interpolates at O(h^4) while the limiter prevents overshoot otherwise.
struct Pchip {
    double z_max, h;
    std::vector<double> f, d;

    explicit Pchip(const RealField& p) {
        const Grid& g = p.grid();
        z_max = g.z_max;
        h = g.dz();
        f = p.values();
        const int n = static_cast<int>(f.size());
        std::vector<double> delta(n - 1);
        for (int i = 0; i < n - 1; ++i) delta[i] = (f[i + 1] - f[i]) / h;
        d.resize(n);
        if (n < 5) {
            for (int i = 0; i < n; ++i) {
                const double dl = i > 0 ? delta[i - 1] : delta[0];
                const double dr = i < n - 1 ? delta[i] : delta[n - 2];
                d[i] = 0.5 * (dl + dr);
            }
            return;
        }
        for (int i = 0; i < n; ++i) {
            if (i >= 2 && i <= n - 3)
                d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
            else if (i == 0)
                d[i] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) /
                       (12.0 * h);
            else if (i == 1)
                d[i] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) /
                       (12.0 * h);
            else if (i == n - 2)
                d[i] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] -
                        f[n - 5]) /
                       (12.0 * h);
            else
                d[i] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] -
                        16.0 * f[n - 4] + 3.0 * f[n - 5]) /
                       (12.0 * h);
        }
        for (int i = 0; i < n; ++i) {
            const double dl = i > 0 ? delta[i - 1] : delta[0];
            const double dr = i < n - 1 ? delta[i] : delta[n - 2];
            if (dl * dr < 0.0 && i > 0 && i < n - 1) {
                d[i] = 0.0;
            } else {
                const double bound = 3.0 * std::min(std::abs(dl), std::abs(dr));
                if (d[i] * (dl + dr) < 0.0)
                    d[i] = 0.0;
                else if (std::abs(d[i]) > bound)
                    d[i] = (d[i] > 0.0 ? bound : -bound);
            }
        }
    }

    double operator()(double z) const {
        const int n = static_cast<int>(f.size());
        int i = static_cast<int>(z / h);
        i = std::min(std::max(i, 0), n - 2);
        const double s = z - i * h;
        const double df = f[i + 1] - f[i];
        const double c2 = (3.0 * df / h - 2.0 * d[i] - d[i + 1]) / h;
        const double c3 = (d[i] + d[i + 1] - 2.0 * df / h) / (h * h);
        return f[i] + s * (d[i] + s * (c2 + s * c3));
    }
};

}  // namespace

RealField rescale_layer(const RealField& profile, double eps, const Grid& grid) {
    if (grid.dz() > eps / 16.0 * (1.0 + 1e-12))
        throw std::invalid_argument("rescale_layer: layer unresolved, need dz <= eps/16");
    Pchip interp(profile);
    RealField out(grid);
    for (int iz = 0; iz < grid.nz; ++iz) {
        const double Z = grid.z(iz) / eps;
        const double val = (Z <= interp.z_max) ? interp(Z) : 0.0;
        for (int iy = 0; iy < grid.ny; ++iy) out.at(iz, iy) = val;
    }
    return out;
}

Assembled assemble(const WKBExpansion& w, int step) {
    Assembled out{RealField(w.grid), RealField(w.grid)};
    double ej = 1.0;
    for (int j = 0; j <= w.m + 2; ++j) {
        if (j <= w.m + 1) {
            const RealField& aj = w.a[j][step];
            RealField Aj = rescale_layer(w.A[j][step], w.eps, w.grid);
            for (int i = 0; i < out.a.size(); ++i) out.a[i] += ej * (aj[i] + Aj[i]);
        }
        const RealField& pj = w.phi[j][step];
        for (int i = 0; i < out.phi.size(); ++i) out.phi[i] += ej * pj[i];
        if (j >= 1 && j <= w.m + 2) {
            RealField Pj = rescale_layer(w.Phi[j - 1][step], w.eps, w.grid);
            for (int i = 0; i < out.phi.size(); ++i) out.phi[i] += ej * Pj[i];
        }
        ej *= w.eps;
    }
    return out;
}

ComplexField to_psi(const RealField& a, const RealField& phi, double eps) {
    ComplexField psi(a.grid());
    for (int i = 0; i < psi.size(); ++i) psi[i] = std::polar(a[i], phi[i] / eps);
    return psi;
}

ComplexField gp_apply(const ComplexField& psi_prev, const ComplexField& psi_cur,
                      const ComplexField& psi_next, double dt, double eps) {
    ComplexField lap = laplacian(psi_cur);
    ComplexField out(psi_cur.grid());
    const std::complex<double> ie(0.0, eps);
    for (int i = 0; i < out.size(); ++i) {
        const std::complex<double> dpsi = (psi_next[i] - psi_prev[i]) / (2.0 * dt);
        out[i] = ie * dpsi + 0.5 * eps * eps * lap[i] -
                 (std::norm(psi_cur[i]) - 1.0) * psi_cur[i];
    }
    return out;
}

namespace {

// max |third z-difference| / dz^3 over interior nodes
template <class T>
double max_d3z(const FieldT<T>& f) {
    const Grid& g = f.grid();
    double m = 0.0;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int iz = 0; iz + 3 < g.nz; ++iz)
            m = std::max(m, std::abs(f.at(iz + 3, iy) - 3.0 * f.at(iz + 2, iy) +
                                     3.0 * f.at(iz + 1, iy) - f.at(iz, iy)));
    const double dz = g.dz();
    return m / (dz * dz * dz);
}

template <class T>
double max_d4z(const FieldT<T>& f) {
    const Grid& g = f.grid();
    double m = 0.0;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int iz = 0; iz + 4 < g.nz; ++iz)
            m = std::max(m, std::abs(f.at(iz + 4, iy) - 4.0 * f.at(iz + 3, iy) +
                                     6.0 * f.at(iz + 2, iy) - 4.0 * f.at(iz + 1, iy) +
                                     f.at(iz, iy)));
    const double dz = g.dz();
    return m / (dz * dz * dz * dz);
}

template <class T>
double max_d3t(const std::vector<FieldT<T>>& snaps, double dt) {
    double m = 0.0;
    for (size_t n = 0; n + 3 < snaps.size(); ++n)
        for (int i = 0; i < snaps[n].size(); ++i)
            m = std::max(m, std::abs(snaps[n + 3][i] - 3.0 * snaps[n + 2][i] +
                                     3.0 * snaps[n + 1][i] - snaps[n][i]));
    return m / (dt * dt * dt);
}

}  // namespace

ResidualRecord residuals(const WKBExpansion& w, int step) {
    w.validate();
    const int ns = w.steps();
    if (step < 1 || step > ns - 2)
        throw std::invalid_argument("residuals: interior time step with both neighbors required");
    const Grid& g = w.grid;
    const double dt = w.dt, eps = w.eps;

    Assembled prev = assemble(w, step - 1);
    Assembled cur = assemble(w, step);
    Assembled next = assemble(w, step + 1);

    ResidualRecord rec;
    rec.R_phi = RealField(g);
    rec.R_a = RealField(g);

    RealField az = gradient_z(cur.a), pz = gradient_z(cur.phi);
    RealField ay = gradient_y(cur.a), py = gradient_y(cur.phi);
    RealField lap_phi = laplacian(cur.phi);
    RealField lap_a = laplacian(cur.a);
    for (int i = 0; i < g.nodes(); ++i) {
        const double da = (next.a[i] - prev.a[i]) / (2.0 * dt);
        const double dphi = (next.phi[i] - prev.phi[i]) / (2.0 * dt);
        const double grad2 = pz[i] * pz[i] + py[i] * py[i];
        rec.R_phi[i] = dphi + 0.5 * grad2 + (cur.a[i] * cur.a[i] - 1.0);
        rec.R_a[i] = da + pz[i] * az[i] + py[i] * ay[i] + 0.5 * cur.a[i] * lap_phi[i];
    }

    ComplexField psi_prev = to_psi(prev.a, prev.phi, eps);
    ComplexField psi_cur = to_psi(cur.a, cur.phi, eps);
    ComplexField psi_next = to_psi(next.a, next.phi, eps);
    rec.gp = gp_apply(psi_prev, psi_cur, psi_next, dt, eps);

    double gap = 0.0;
    for (int i = 0; i < g.nodes(); ++i) {
        const std::complex<double> pred =
            (std::complex<double>(-cur.a[i] * rec.R_phi[i] + 0.5 * eps * eps * lap_a[i],
                                  eps * rec.R_a[i])) *
            std::polar(1.0, cur.phi[i] / eps);
        gap = std::max(gap, std::abs(rec.gp[i] - pred));
    }
    rec.identity_gap_sup = gap;

    rec.norm_gp_l2 = norm(rec.gp, NormKind::l2);
    rec.norm_Ra_l2 = norm(rec.R_a, NormKind::l2);
    rec.norm_Rphi_l2 = norm(rec.R_phi, NormKind::l2);

    // truncation-error scale of the discrete operators on both sides of the
    // identity (centered stencils, one-sided boundary rows share the order)
    double sup_a = 0.0, sup_gp = 0.0, sup_gz = 0.0, sup_ga = 0.0;
    for (int i = 0; i < g.nodes(); ++i) {
        sup_a = std::max(sup_a, std::abs(cur.a[i]));
        sup_gz = std::max(sup_gz, std::abs(pz[i]));
        sup_gp = std::max(sup_gp, std::abs(py[i]));
        sup_ga = std::max(sup_ga, std::abs(az[i]));
    }
    const double sup_gphi = std::max(sup_gz, sup_gp);

    std::vector<ComplexField> psi_snaps;
    std::vector<RealField> a_snaps, phi_snaps;
    const int lo = std::max(0, std::min(step - 2, ns - 4));
    if (ns >= 4)
        for (int n = lo; n < lo + 4; ++n) {
            Assembled s = assemble(w, n);
            psi_snaps.push_back(to_psi(s.a, s.phi, eps));
            a_snaps.push_back(std::move(s.a));
            phi_snaps.push_back(std::move(s.phi));
        }
    const double d3t_psi = psi_snaps.empty() ? 0.0 : max_d3t(psi_snaps, dt);
    const double d3t_a = a_snaps.empty() ? 0.0 : max_d3t(a_snaps, dt);
    const double d3t_phi = phi_snaps.empty() ? 0.0 : max_d3t(phi_snaps, dt);

    const double dz2 = g.dz() * g.dz();
    const double dt2 = dt * dt;
    rec.stencil_tol =
        dt2 / 6.0 * (eps * d3t_psi + eps * d3t_a + sup_a * d3t_phi) +
        dz2 * (0.5 * eps * eps * (max_d4z(psi_cur) + max_d4z(cur.a)) +
               sup_a * sup_gphi * max_d3z(cur.phi) / 3.0 +
               eps * (sup_gphi * max_d3z(cur.a) + sup_ga * max_d3z(cur.phi)) / 6.0 +
               eps * 0.5 * sup_a * max_d4z(cur.phi) / 12.0);
    return rec;
}

}  // namespace gpbl
