#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace gpbl {

/// Uniform grid on [0, z_max], node 0 at z = 0, node nz-1 at z = z_max.
/// An optional tangential direction y is periodic on [0, y_max) with ny
/// nodes (y_max is identified with y = 0).
struct Grid {
    double z_max = 1.0;
    int nz = 2;
    double y_max = 0.0;
    int ny = 1;

    static Grid line(double z_max, int nz);
    static Grid strip(double z_max, int nz, double y_max, int ny);

    double dz() const { return z_max / (nz - 1); }
    double dy() const { return y_max / ny; }
    bool has_y() const { return ny > 1; }
    int nodes() const { return nz * ny; }
    double z(int iz) const { return iz * dz(); }
    double y(int iy) const { return iy * dy(); }
    int idx(int iz, int iy = 0) const { return iz * ny + iy; }

    bool operator==(const Grid&) const = default;
};

template <class T>
class FieldT {
public:
    FieldT() = default;
    explicit FieldT(const Grid& g) : grid_(g), v_(g.nodes(), T{}) {}

    static FieldT sampled(const Grid& g, const std::function<T(double, double)>& f) {
        FieldT out(g);
        for (int iz = 0; iz < g.nz; ++iz)
            for (int iy = 0; iy < g.ny; ++iy)
                out.v_[g.idx(iz, iy)] = f(g.z(iz), g.y(iy));
        return out;
    }

    const Grid& grid() const { return grid_; }
    int size() const { return static_cast<int>(v_.size()); }
    T& operator[](int i) { return v_[i]; }
    const T& operator[](int i) const { return v_[i]; }
    T& at(int iz, int iy = 0) { return v_[grid_.idx(iz, iy)]; }
    const T& at(int iz, int iy = 0) const { return v_[grid_.idx(iz, iy)]; }
    const std::vector<T>& values() const { return v_; }
    std::vector<T>& values() { return v_; }

private:
    Grid grid_;
    std::vector<T> v_;
};

using RealField = FieldT<double>;
using ComplexField = FieldT<std::complex<double>>;

// elementwise helpers shared by the solvers
template <class T>
FieldT<T> operator+(const FieldT<T>& a, const FieldT<T>& b) {
    FieldT<T> out(a.grid());
    for (int i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

template <class T>
FieldT<T> operator-(const FieldT<T>& a, const FieldT<T>& b) {
    FieldT<T> out(a.grid());
    for (int i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

template <class T, class S>
FieldT<T> operator*(S c, const FieldT<T>& a) {
    FieldT<T> out(a.grid());
    for (int i = 0; i < a.size(); ++i) out[i] = c * a[i];
    return out;
}

template <class T>
FieldT<T> operator*(const FieldT<T>& a, const FieldT<T>& b) {
    FieldT<T> out(a.grid());
    for (int i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

}  // namespace gpbl
