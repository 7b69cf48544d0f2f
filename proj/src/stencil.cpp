#include "gpbl/stencil.hpp"

namespace gpbl {

namespace {

template <class T>
void check_grid(const FieldT<T>& f) {
    if (f.grid().nz < 3) throw std::invalid_argument("stencil: grid too small (nz < 3)");
}

}  // namespace

template <class T>
FieldT<T> laplacian(const FieldT<T>& f, ZBoundary bc) {
    check_grid(f);
    const Grid& g = f.grid();
    FieldT<T> out(g);
    const double idz2 = 1.0 / (g.dz() * g.dz());
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int iz = 1; iz < g.nz - 1; ++iz)
            out.at(iz, iy) =
                (f.at(iz - 1, iy) - 2.0 * f.at(iz, iy) + f.at(iz + 1, iy)) * idz2;
        if (bc == ZBoundary::one_sided && g.nz >= 4) {
            out.at(0, iy) = (2.0 * f.at(0, iy) - 5.0 * f.at(1, iy) + 4.0 * f.at(2, iy) -
                             f.at(3, iy)) *
                            idz2;
            const int n = g.nz - 1;
            out.at(n, iy) = (2.0 * f.at(n, iy) - 5.0 * f.at(n - 1, iy) +
                             4.0 * f.at(n - 2, iy) - f.at(n - 3, iy)) *
                            idz2;
        }
    }
    if (g.has_y()) {
        const double idy2 = 1.0 / (g.dy() * g.dy());
        for (int iz = 0; iz < g.nz; ++iz) {
            if (bc == ZBoundary::zero && (iz == 0 || iz == g.nz - 1)) continue;
            for (int iy = 0; iy < g.ny; ++iy) {
                const int ym = (iy + g.ny - 1) % g.ny;
                const int yp = (iy + 1) % g.ny;
                out.at(iz, iy) +=
                    (f.at(iz, ym) - 2.0 * f.at(iz, iy) + f.at(iz, yp)) * idy2;
            }
        }
    }
    return out;
}

template <class T>
FieldT<T> gradient_z(const FieldT<T>& f, ZBoundary bc) {
    check_grid(f);
    const Grid& g = f.grid();
    FieldT<T> out(g);
    const double i2dz = 1.0 / (2.0 * g.dz());
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int iz = 1; iz < g.nz - 1; ++iz)
            out.at(iz, iy) = (f.at(iz + 1, iy) - f.at(iz - 1, iy)) * i2dz;
        if (bc == ZBoundary::one_sided) {
            out.at(0, iy) =
                (-3.0 * f.at(0, iy) + 4.0 * f.at(1, iy) - f.at(2, iy)) * i2dz;
            const int n = g.nz - 1;
            out.at(n, iy) =
                (3.0 * f.at(n, iy) - 4.0 * f.at(n - 1, iy) + f.at(n - 2, iy)) * i2dz;
        }
    }
    return out;
}

template <class T>
FieldT<T> gradient_y(const FieldT<T>& f) {
    const Grid& g = f.grid();
    FieldT<T> out(g);
    if (!g.has_y()) return out;
    const double i2dy = 1.0 / (2.0 * g.dy());
    for (int iz = 0; iz < g.nz; ++iz)
        for (int iy = 0; iy < g.ny; ++iy) {
            const int ym = (iy + g.ny - 1) % g.ny;
            const int yp = (iy + 1) % g.ny;
            out.at(iz, iy) = (f.at(iz, yp) - f.at(iz, ym)) * i2dy;
        }
    return out;
}

template <class T>
FieldT<T> divergence(const FieldT<T>& vz, const FieldT<T>& vy, ZBoundary bc) {
    FieldT<T> out = gradient_z(vz, bc);
    if (vz.grid().has_y()) {
        FieldT<T> dy = gradient_y(vy);
        for (int i = 0; i < out.size(); ++i) out[i] += dy[i];
    }
    return out;
}

template RealField laplacian(const RealField&, ZBoundary);
template ComplexField laplacian(const ComplexField&, ZBoundary);
template RealField gradient_z(const RealField&, ZBoundary);
template ComplexField gradient_z(const ComplexField&, ZBoundary);
template RealField gradient_y(const RealField&);
template ComplexField gradient_y(const ComplexField&);
template RealField divergence(const RealField&, const RealField&, ZBoundary);
template ComplexField divergence(const ComplexField&, const ComplexField&, ZBoundary);

}  // namespace gpbl
