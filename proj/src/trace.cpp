#include "gpbl/trace.hpp"

#include <array>

namespace gpbl {

namespace {

// forward one-sided stencils of fourth-order accuracy (times dz^-j)
const std::vector<std::vector<double>> kStencil = {
    {1.0},
    {-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -1.0 / 4.0},
    {15.0 / 4.0, -77.0 / 6.0, 107.0 / 6.0, -13.0, 61.0 / 12.0, -5.0 / 6.0},
    {-49.0 / 8.0, 29.0, -461.0 / 8.0, 62.0, -307.0 / 8.0, 13.0, -15.0 / 8.0},
    {28.0 / 3.0, -111.0 / 2.0, 142.0, -1219.0 / 6.0, 176.0, -185.0 / 2.0,
     82.0 / 3.0, -7.0 / 2.0},
};

}  // namespace

TraceRecord boundary_trace(const RealField& f, int max_order) {
    if (max_order < 0 || max_order > 4)
        throw std::invalid_argument("boundary_trace: derivative order must be in [0, 4]");
    const Grid& g = f.grid();
    if (g.nz < max_order + 5)
        throw std::invalid_argument("boundary_trace: insufficient nodes for one-sided stencil");

    TraceRecord rec;
    rec.max_order = max_order;
    rec.ny = g.ny;
    rec.deriv.resize(max_order + 1);
    double scale = 1.0;
    for (int j = 0; j <= max_order; ++j) {
        const auto& w = kStencil[j];
        rec.deriv[j].resize(g.ny);
        for (int iy = 0; iy < g.ny; ++iy) {
            double s = 0.0;
            for (int p = 0; p < static_cast<int>(w.size()); ++p)
                s += w[p] * f.at(p, iy);
            rec.deriv[j][iy] = s * scale;
        }
        scale /= g.dz();
    }
    return rec;
}

void TraceSeries::push(double time, TraceRecord rec) {
    if (!t.empty() && time <= t.back())
        throw std::invalid_argument("TraceSeries: time samples must be strictly increasing");
    t.push_back(time);
    records.push_back(std::move(rec));
}

}  // namespace gpbl
