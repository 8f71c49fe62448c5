#include "depo/field.hpp"

#include "depo/error.hpp"

namespace depo {

const char* to_string(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "outflow";
}

void GridSpec::validate() const {
  if (!(dx > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid dx must be positive");
  if (n_cells < 4) throw Error(ErrorKind::InvalidArgument, "grid needs at least 4 cells");
}

std::size_t GridSpec::neighbour(std::size_t i, int offset) const {
  if (offset < 0) {
    if (i > 0) return i - 1;
    return boundary == Boundary::Periodic ? n_cells - 1 : 0;
  }
  if (i + 1 < n_cells) return i + 1;
  return boundary == Boundary::Periodic ? 0 : n_cells - 1;
}

GridSpec GridSpec::uniform(double x_min, double x_max, std::size_t n_cells, Boundary b) {
  GridSpec g{x_min, (x_max - x_min) / static_cast<double>(n_cells), n_cells, b};
  g.validate();
  return g;
}

Field1D::Field1D(const GridSpec& g, double t)
    : grid(g), rho(g.n_cells, 0.0), u(g.n_cells, 0.0), time(t) {
  grid.validate();
}

double Field1D::mass() const {
  double s = 0.0;
  for (double r : rho) s += r;
  return s * grid.dx;
}

double Field1D::total_u() const {
  double s = 0.0;
  for (double v : u) s += v;
  return s * grid.dx;
}

}  // namespace depo
