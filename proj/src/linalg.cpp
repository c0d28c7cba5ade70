#include "tann/linalg.hpp"

#include <cmath>

#include "tann/errors.hpp"

namespace tann {

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != rows * cols) {
    throw DimensionError("matrix data length does not equal rows * cols");
  }
}

std::span<double> as_reals(std::span<Complex> values) {
  return {reinterpret_cast<double*>(values.data()), values.size() * 2};
}

std::span<const double> as_reals(std::span<const Complex> values) {
  return {reinterpret_cast<const double*>(values.data()), values.size() * 2};
}

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace tann
