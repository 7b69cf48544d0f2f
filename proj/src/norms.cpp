#include "gpbl/norms.hpp"

#include <cmath>

#include "gpbl/stencil.hpp"

namespace gpbl {

namespace {

template <class T>
double quad_weight(const Grid& g, int iz) {
    double w = g.dz();
    if (iz == 0 || iz == g.nz - 1) w *= 0.5;
    if (g.has_y()) w *= g.dy();
    return w;
}

template <class T>
double l2_norm(const FieldT<T>& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (int iz = 0; iz < g.nz; ++iz) {
        const double w = quad_weight<T>(g, iz);
        for (int iy = 0; iy < g.ny; ++iy) s += w * std::norm(std::complex<double>(f.at(iz, iy)));
    }
    return std::sqrt(s);
}

template <class T>
double sup_norm(const FieldT<T>& f) {
    double m = 0.0;
    for (int i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
    return m;
}

template <class T>
double norm_impl(const FieldT<T>& f, NormKind kind) {
    switch (kind) {
        case NormKind::l2:
            return l2_norm(f);
        case NormKind::sup:
            return sup_norm(f);
        case NormKind::h1: {
            double s = l2_norm(f);
            double gz = l2_norm(gradient_z(f));
            double gy = f.grid().has_y() ? l2_norm(gradient_y(f)) : 0.0;
            return std::sqrt(s * s + gz * gz + gy * gy);
        }
    }
    return 0.0;
}

}  // namespace

double norm(const RealField& f, NormKind kind) { return norm_impl(f, kind); }
double norm(const ComplexField& f, NormKind kind) { return norm_impl(f, kind); }

double integrate(const RealField& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (int iz = 0; iz < g.nz; ++iz) {
        const double w = quad_weight<double>(g, iz);
        for (int iy = 0; iy < g.ny; ++iy) s += w * f.at(iz, iy);
    }
    return s;
}

}  // namespace gpbl
