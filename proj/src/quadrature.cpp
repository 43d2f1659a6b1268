#include "wavecrit/quadrature.hpp"

#include <cmath>

#include "wavecrit/errors.hpp"

namespace wavecrit {

CellWeights exp_cell_weights(double rate, double h) {
  const double z = -rate * h;
  CellWeights w{std::exp(z), 0.0, 0.0};
  if (std::abs(z) < 0.1) {
    // near/h = sum z^k/(k+2)!, far/h = sum (k+1) z^k/(k+2)!
    double term = 0.5;  // z^k/(k+2)! at k = 0
    double near = 0.0;
    double far = 0.0;
    for (int k = 0; k < 14; ++k) {
      near += term;
      far += (k + 1) * term;
      term *= z / (k + 3);
    }
    w.near = h * near;
    w.far = h * far;
  } else {
    const double em1 = std::expm1(z);
    w.near = h * (em1 - z) / (z * z);
    w.far = h * (w.decay * (z - 1.0) + 1.0) / (z * z);
  }
  return w;
}

namespace {

void check_sizes(std::span<const double> g, std::span<double> out) {
  if (g.size() != out.size() || g.empty()) {
    throw GridMismatch("sweep input and output must have equal non-zero size");
  }
}

}  // namespace

void exp_sweep_left(std::span<const double> g, double rate, double h,
                    double head, std::span<double> out) {
  check_sizes(g, out);
  const CellWeights w = exp_cell_weights(rate, h);
  out[0] = head;
  for (std::size_t j = 1; j < g.size(); ++j) {
    out[j] = w.decay * out[j - 1] + w.near * g[j] + w.far * g[j - 1];
  }
}

void exp_sweep_right(std::span<const double> g, double rate, double h,
                     double tail, std::span<double> out) {
  check_sizes(g, out);
  const CellWeights w = exp_cell_weights(rate, h);
  const std::size_t n = g.size();
  out[n - 1] = tail;
  for (std::size_t j = n - 1; j-- > 0;) {
    out[j] = w.decay * out[j + 1] + w.near * g[j] + w.far * g[j + 1];
  }
}

void cumulative_trapezoid(std::span<const double> g, double h, double head,
                          std::span<double> out) {
  check_sizes(g, out);
  out[0] = head;
  for (std::size_t j = 1; j < g.size(); ++j) {
    out[j] = out[j - 1] + 0.5 * h * (g[j] + g[j - 1]);
  }
}

}  // namespace wavecrit
