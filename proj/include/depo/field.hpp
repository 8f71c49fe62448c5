#pragma once

#include <cstddef>
#include <vector>

#include "depo/characteristics.hpp"

namespace depo {

enum class Boundary { Periodic, Outflow };

const char* to_string(Boundary b);

/// Uniform 1-D grid of n_cells cells starting at x_min.
struct GridSpec {
  double x_min = 0.0;
  double dx = 1.0;
  std::size_t n_cells = 4;
  Boundary boundary = Boundary::Periodic;

  /// Throws InvalidArgument unless dx > 0 and n_cells >= 4.
  void validate() const;

  double x_max() const { return x_min + dx * static_cast<double>(n_cells); }
  double center(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * dx; }
  /// Left face of cell i; node i in a HeightField.
  double node(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }

  /// Index of the neighbour at offset -1 or +1, honouring the boundary.
  std::size_t neighbour(std::size_t i, int offset) const;

  static GridSpec uniform(double x_min, double x_max, std::size_t n_cells, Boundary b);
};

struct Field1D {
  GridSpec grid;
  std::vector<double> rho;
  std::vector<double> u;
  double time = 0.0;

  Field1D() = default;
  Field1D(const GridSpec& g, double t = 0.0);

  std::size_t size() const { return rho.size(); }
  PhysState at(std::size_t i) const { return {rho[i], u[i]}; }
  void set(std::size_t i, const PhysState& p) {
    rho[i] = p.rho;
    u[i] = p.u;
  }

  double mass() const;     // sum rho dx
  double total_u() const;  // sum u dx
};

}  // namespace depo
