#include "gpbl/gp_solver.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

#include "gpbl/norms.hpp"
#include "gpbl/stencil.hpp"

namespace gpbl {

struct SineKinetic::Impl {
    Grid grid;
    int n = 0;  // interior z nodes
    std::vector<double> lam_z, lam_y;
    double* rbuf = nullptr;
    fftw_plan dst = nullptr;
    fftw_complex* ybuf = nullptr;
    fftw_plan yfwd = nullptr, ybwd = nullptr;

    explicit Impl(const Grid& g) : grid(g), n(g.nz - 2) {
        if (n < 1) throw std::invalid_argument("SineKinetic: need at least one interior node");
        lam_z.resize(n);
        for (int k = 0; k < n; ++k) {
            const double kz = (k + 1) * std::numbers::pi / g.z_max;
            lam_z[k] = kz * kz;
        }
        rbuf = fftw_alloc_real(n);
        dst = fftw_plan_r2r_1d(n, rbuf, rbuf, FFTW_RODFT00, FFTW_ESTIMATE);
        if (g.has_y()) {
            lam_y.resize(g.ny);
            for (int q = 0; q < g.ny; ++q) {
                const int qs = (q <= g.ny / 2) ? q : q - g.ny;
                const double ky = 2.0 * std::numbers::pi * qs / g.y_max;
                lam_y[q] = ky * ky;
            }
            ybuf = fftw_alloc_complex(g.ny);
            yfwd = fftw_plan_dft_1d(g.ny, ybuf, ybuf, FFTW_FORWARD, FFTW_ESTIMATE);
            ybwd = fftw_plan_dft_1d(g.ny, ybuf, ybuf, FFTW_BACKWARD, FFTW_ESTIMATE);
        }
    }
    ~Impl() {
        fftw_destroy_plan(dst);
        fftw_free(rbuf);
        if (ybuf) {
            fftw_destroy_plan(yfwd);
            fftw_destroy_plan(ybwd);
            fftw_free(ybuf);
        }
    }
};

SineKinetic::SineKinetic(const Grid& g) : impl_(std::make_unique<Impl>(g)) {}
SineKinetic::~SineKinetic() = default;

void SineKinetic::advance(ComplexField& psi, double dt, double eps) const {
    const Grid& g = impl_->grid;
    if (!(psi.grid() == g)) throw std::invalid_argument("SineKinetic: grid mismatch");
    const int n = impl_->n, ny = g.ny;

    // sine coefficients of u = psi - 1, per y column, re and im separately
    std::vector<std::complex<double>> coef(static_cast<size_t>(n) * ny);
    for (int iy = 0; iy < ny; ++iy) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int k = 0; k < n; ++k) {
                const std::complex<double> u = psi.at(k + 1, iy) - 1.0;
                impl_->rbuf[k] = pass == 0 ? u.real() : u.imag();
            }
            fftw_execute(impl_->dst);
            for (int k = 0; k < n; ++k) {
                auto& c = coef[static_cast<size_t>(k) * ny + iy];
                if (pass == 0)
                    c.real(impl_->rbuf[k]);
                else
                    c.imag(impl_->rbuf[k]);
            }
        }
    }

    if (g.has_y()) {
        for (int k = 0; k < n; ++k) {
            auto* row = &coef[static_cast<size_t>(k) * ny];
            for (int q = 0; q < ny; ++q) {
                impl_->ybuf[q][0] = row[q].real();
                impl_->ybuf[q][1] = row[q].imag();
            }
            fftw_execute(impl_->yfwd);
            for (int q = 0; q < ny; ++q) {
                const double lam = impl_->lam_z[k] + impl_->lam_y[q];
                const std::complex<double> ph = std::polar(1.0, -0.5 * eps * lam * dt);
                const std::complex<double> c(impl_->ybuf[q][0], impl_->ybuf[q][1]);
                const std::complex<double> r = c * ph;
                impl_->ybuf[q][0] = r.real();
                impl_->ybuf[q][1] = r.imag();
            }
            fftw_execute(impl_->ybwd);
            for (int q = 0; q < ny; ++q)
                row[q] = std::complex<double>(impl_->ybuf[q][0], impl_->ybuf[q][1]) /
                         static_cast<double>(ny);
        }
    } else {
        for (int k = 0; k < n; ++k)
            coef[k] *= std::polar(1.0, -0.5 * eps * impl_->lam_z[k] * dt);
    }

    const double scale = 1.0 / (2.0 * (n + 1));
    for (int iy = 0; iy < ny; ++iy) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int k = 0; k < n; ++k) {
                const auto& c = coef[static_cast<size_t>(k) * ny + iy];
                impl_->rbuf[k] = pass == 0 ? c.real() : c.imag();
            }
            fftw_execute(impl_->dst);
            for (int k = 0; k < n; ++k) {
                auto& p = psi.at(k + 1, iy);
                const double v = impl_->rbuf[k] * scale;
                if (pass == 0)
                    p = {1.0 + v, p.imag()};
                else
                    p = {p.real(), v};
            }
        }
        psi.at(0, iy) = 1.0;
        psi.at(g.nz - 1, iy) = 1.0;
    }
}

double SineKinetic::grad_norm_sq(const ComplexField& psi) const {
    const Grid& g = impl_->grid;
    if (!(psi.grid() == g)) throw std::invalid_argument("SineKinetic: grid mismatch");
    const int n = impl_->n, ny = g.ny;

    std::vector<std::complex<double>> coef(static_cast<size_t>(n) * ny);
    for (int iy = 0; iy < ny; ++iy) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int k = 0; k < n; ++k) {
                const std::complex<double> u = psi.at(k + 1, iy) - 1.0;
                impl_->rbuf[k] = pass == 0 ? u.real() : u.imag();
            }
            fftw_execute(impl_->dst);
            for (int k = 0; k < n; ++k) {
                auto& c = coef[static_cast<size_t>(k) * ny + iy];
                if (pass == 0)
                    c.real(impl_->rbuf[k]);
                else
                    c.imag(impl_->rbuf[k]);
            }
        }
    }

    double sum = 0.0;
    if (g.has_y()) {
        for (int k = 0; k < n; ++k) {
            auto* row = &coef[static_cast<size_t>(k) * ny];
            for (int q = 0; q < ny; ++q) {
                impl_->ybuf[q][0] = row[q].real();
                impl_->ybuf[q][1] = row[q].imag();
            }
            fftw_execute(impl_->yfwd);
            for (int q = 0; q < ny; ++q) {
                const double lam = impl_->lam_z[k] + impl_->lam_y[q];
                const double b2 = (impl_->ybuf[q][0] * impl_->ybuf[q][0] +
                                   impl_->ybuf[q][1] * impl_->ybuf[q][1]) /
                                  (static_cast<double>(ny) * ny);
                sum += lam * b2;
            }
        }
        sum *= g.y_max;
    } else {
        for (int k = 0; k < n; ++k) sum += impl_->lam_z[k] * std::norm(coef[k]);
    }
    // DST-I coefficients are (n+1) times the sine-series amplitudes
    return sum * 0.5 * g.z_max / (static_cast<double>(n + 1) * (n + 1));
}

namespace {

// scheme-consistent discrete GL energy: exact-in-basis gradient term plus the
// pointwise potential term; the semi-discrete flow conserves this exactly and
// the splitting preserves it to O(dt^2)
double discrete_energy(const SineKinetic& kin, const ComplexField& psi, double eps) {
    RealField dens(psi.grid());
    for (int i = 0; i < dens.size(); ++i) {
        const double rho1 = std::norm(psi[i]) - 1.0;
        dens[i] = 0.5 * rho1 * rho1;
    }
    return 0.5 * eps * eps * kin.grad_norm_sq(psi) + integrate(dens);
}

void potential_half(ComplexField& psi, double dt, double eps) {
    for (int i = 0; i < psi.size(); ++i)
        psi[i] *= std::polar(1.0, -(std::norm(psi[i]) - 1.0) * dt / (2.0 * eps));
}

}  // namespace

void step_strang(ComplexField& psi, double dt, double eps, const SineKinetic& kin) {
    potential_half(psi, dt, eps);
    kin.advance(psi, dt, eps);
    potential_half(psi, dt, eps);
}

int GPTrajectory::step_at(double tq) const {
    if (t.empty()) throw std::out_of_range("GPTrajectory: empty");
    int best = 0;
    for (int k = 1; k < steps(); ++k)
        if (std::abs(t[k] - tq) < std::abs(t[best] - tq)) best = k;
    return best;
}

GPTrajectory gp_solve(const ComplexField& psi_init, double T, double eps,
                      const GPOptions& opts) {
    const Grid& g = psi_init.grid();
    if (g.dz() > eps / 16.0 * (1.0 + 1e-12))
        throw std::invalid_argument("gp_solve: layer unresolved, need dz <= eps/16");
    for (int iy = 0; iy < g.ny; ++iy)
        if (std::abs(psi_init.at(0, iy) - 1.0) > 1e-12 ||
            std::abs(psi_init.at(g.nz - 1, iy) - 1.0) > 1e-12)
            throw std::invalid_argument("gp_solve: initial data must equal 1 on z-boundary rows");

    double dt = opts.dt;
    if (dt <= 0.0) dt = std::min(0.5 * g.dz() * g.dz() / eps, 0.1 * eps);
    const int nsteps = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
    dt = T / nsteps;

    SineKinetic kin(g);
    GPTrajectory traj;
    traj.eps = eps;
    traj.grid = g;
    traj.dt = dt;

    ComplexField psi = psi_init;
    const double e0 = discrete_energy(kin, psi, eps);
    traj.t.push_back(0.0);
    traj.psi.push_back(psi);
    for (int nstep = 1; nstep <= nsteps; ++nstep) {
        step_strang(psi, dt, eps, kin);
        for (int iy = 0; iy < g.ny; ++iy)
            traj.boundary_drift =
                std::max(traj.boundary_drift, std::abs(psi.at(0, iy) - 1.0));
        if (nstep % opts.save_every == 0 || nstep == nsteps) {
            for (int i = 0; i < psi.size(); ++i)
                if (!std::isfinite(psi[i].real()) || !std::isfinite(psi[i].imag()))
                    throw std::runtime_error("gp_solve: non-finite state at t = " +
                                             std::to_string(nstep * dt));
            traj.t.push_back(nstep * dt);
            traj.psi.push_back(psi);
            if (e0 > 0.0)
                traj.energy_drift =
                    std::max(traj.energy_drift,
                             std::abs(discrete_energy(kin, psi, eps) - e0) / e0);
        }
    }
    return traj;
}

double gl_energy(const ComplexField& psi, double eps) {
    ComplexField gz = gradient_z(psi);
    ComplexField gy = gradient_y(psi);
    RealField dens(psi.grid());
    for (int i = 0; i < dens.size(); ++i) {
        const double rho1 = std::norm(psi[i]) - 1.0;
        dens[i] = 0.5 * eps * eps * (std::norm(gz[i]) + std::norm(gy[i])) + 0.5 * rho1 * rho1;
    }
    return integrate(dens);
}

Madelung madelung_observables(const ComplexField& psi, double eps) {
    ComplexField gz = gradient_z(psi);
    ComplexField gy = gradient_y(psi);
    Madelung m{RealField(psi.grid()), RealField(psi.grid()), RealField(psi.grid())};
    for (int i = 0; i < psi.size(); ++i) {
        m.density[i] = std::norm(psi[i]);
        m.momentum_z[i] = eps * std::imag(std::conj(psi[i]) * gz[i]);
        m.momentum_y[i] = eps * std::imag(std::conj(psi[i]) * gy[i]);
    }
    return m;
}

}  // namespace gpbl
