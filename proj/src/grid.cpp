#include "hjlab/grid.hpp"

#include <cmath>
#include <sstream>

namespace hjlab {

int Grid1D::node_at(double xq) const {
    const double s = (xq - x0) / dx;
    const long j = std::lround(s);
    if (std::abs(s - j) > 1e-6 || j < 0 || j >= n_nodes) {
        std::ostringstream os;
        os << "point " << xq << " is not a node of the grid (x0=" << x0
           << ", dx=" << dx << ", n=" << n_nodes << ")";
        throw JunctionOffGrid(os.str());
    }
    return static_cast<int>(j);
}

bool Grid1D::same_as(const Grid1D &o) const {
    return n_nodes == o.n_nodes && std::abs(x0 - o.x0) <= 1e-12 * std::max(1.0, std::abs(x0)) &&
           std::abs(dx - o.dx) <= 1e-12 * dx && junction_indices == o.junction_indices;
}

Grid1D Grid1D::over(double x_lo, double x_hi, double dx,
                    const std::vector<double> &junctions) {
    if (!(dx > 0) || !(x_hi > x_lo)) throw Error("grid needs dx > 0 and x_hi > x_lo");
    Grid1D g;
    g.x0 = x_lo;
    g.dx = dx;
    const double s = (x_hi - x_lo) / dx;
    const long m = std::lround(s);
    if (std::abs(s - m) > 1e-6 || m < 2)
        throw JunctionOffGrid("domain length is not a multiple of dx (or < 2 cells)");
    g.n_nodes = static_cast<int>(m) + 1;
    int prev = -1;
    for (double b : junctions) {
        const int j = g.node_at(b);
        if (j <= prev) throw JunctionOffGrid("junctions must land on distinct increasing nodes");
        g.junction_indices.push_back(j);
        prev = j;
    }
    return g;
}

double GridSolution::measured_lip_space() const {
    double m = 0;
    for (int j = 0; j + 1 < grid.n_nodes; ++j)
        m = std::max(m, std::abs(values[j + 1] - values[j]));
    return m / grid.dx;
}

} // namespace hjlab
