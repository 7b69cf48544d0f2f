#include "gpbl/grid.hpp"

namespace gpbl {

Grid Grid::line(double z_max, int nz) {
    if (z_max <= 0.0) throw std::invalid_argument("Grid: z_max must be positive");
    if (nz < 2) throw std::invalid_argument("Grid: nz must be at least 2");
    return Grid{z_max, nz, 0.0, 1};
}

Grid Grid::strip(double z_max, int nz, double y_max, int ny) {
    if (y_max <= 0.0 || ny < 2)
        throw std::invalid_argument("Grid: tangential direction needs y_max > 0 and ny >= 2");
    Grid g = line(z_max, nz);
    g.y_max = y_max;
    g.ny = ny;
    return g;
}

}  // namespace gpbl
