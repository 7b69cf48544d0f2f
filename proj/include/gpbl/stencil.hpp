#pragma once

#include "gpbl/grid.hpp"

namespace gpbl {

/// How the z-boundary rows of a differential stencil are filled.
///  one_sided: second-order one-sided stencils at z = 0 and z = z_max
///  zero:      boundary rows left at 0 (caller owns them, e.g. Dirichlet solvers)
enum class ZBoundary { one_sided, zero };

template <class T>
FieldT<T> laplacian(const FieldT<T>& f, ZBoundary bc = ZBoundary::one_sided);

template <class T>
FieldT<T> gradient_z(const FieldT<T>& f, ZBoundary bc = ZBoundary::one_sided);

/// Centered periodic derivative in the tangential direction; zero field when
/// the grid has no tangential direction.
template <class T>
FieldT<T> gradient_y(const FieldT<T>& f);

/// div(v) for a vector field with components (vz, vy); vy is ignored on
/// line grids.
template <class T>
FieldT<T> divergence(const FieldT<T>& vz, const FieldT<T>& vy,
                     ZBoundary bc = ZBoundary::one_sided);

extern template RealField laplacian(const RealField&, ZBoundary);
extern template ComplexField laplacian(const ComplexField&, ZBoundary);
extern template RealField gradient_z(const RealField&, ZBoundary);
extern template ComplexField gradient_z(const ComplexField&, ZBoundary);
extern template RealField gradient_y(const RealField&);
extern template ComplexField gradient_y(const ComplexField&);
extern template RealField divergence(const RealField&, const RealField&, ZBoundary);
extern template ComplexField divergence(const ComplexField&, const ComplexField&, ZBoundary);

}  // namespace gpbl
