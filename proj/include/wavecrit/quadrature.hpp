#pragma once

#include <span>

namespace wavecrit {

/// Product-integration weights for one cell of width h against the kernel
/// e^{-r t}, t in [0, h], with the integrand linear in t:
///   int_0^h e^{-r t} g(t) dt = near * g(0) + far * g(h).
struct CellWeights {
  double decay;  ///< e^{-r h}
  double near;
  double far;
};

CellWeights exp_cell_weights(double rate, double h);

/// out[j] = int_{-inf}^{x_j} e^{-rate (x_j - y)} g(y) dy on a uniform grid,
/// g piecewise linear between nodes; `head` is the value at x_0 (the
/// contribution of (-inf, x_0]).
void exp_sweep_left(std::span<const double> g, double rate, double h,
                    double head, std::span<double> out);

/// out[j] = int_{x_j}^{inf} e^{-rate (y - x_j)} g(y) dy; `tail` is the value
/// at the last node.
void exp_sweep_right(std::span<const double> g, double rate, double h,
                     double tail, std::span<double> out);

/// Cumulative trapezoid, out[0] = head.
void cumulative_trapezoid(std::span<const double> g, double h, double head,
                          std::span<double> out);

}  // namespace wavecrit
