#pragma once

#include "gpbl/grid.hpp"

namespace gpbl {

enum class NormKind { l2, sup, h1 };

double norm(const RealField& f, NormKind kind);
double norm(const ComplexField& f, NormKind kind);

/// Trapezoidal quadrature of f over the domain (dy-weighted sum in y).
double integrate(const RealField& f);

}  // namespace gpbl
