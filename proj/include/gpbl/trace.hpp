#pragma once

#include "gpbl/grid.hpp"

namespace gpbl {

/// Boundary values and one-sided z-derivatives at z = 0, per tangential node.
struct TraceRecord {
    int max_order = 0;      // highest derivative order stored
    int accuracy_order = 4; // order of accuracy of the one-sided stencils
    int ny = 1;
    std::vector<std::vector<double>> deriv;  // deriv[j][iy] = d^j f/dz^j (0, y_iy)

    double value(int j, int iy = 0) const { return deriv.at(j).at(iy); }
};

/// One-sided finite-difference traces d^j/dz^j f(z=0,.) for j = 0..J,
/// fourth-order accurate. Requires J <= 4 and nz >= J + 5.
TraceRecord boundary_trace(const RealField& f, int max_order);

/// Trace records sampled at strictly increasing times.
struct TraceSeries {
    std::vector<double> t;
    std::vector<TraceRecord> records;

    void push(double time, TraceRecord rec);
    const TraceRecord& at_time_index(int k) const { return records.at(k); }
};

}  // namespace gpbl
