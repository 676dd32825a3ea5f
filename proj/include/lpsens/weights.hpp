#pragma once

#include <string>

#include "lpsens/matrix.hpp"

namespace lpsens {

enum class WeightKind { Leverage, Lewis, Sensitivity, Estimate };

struct WeightVector {
  Vector values;
  WeightKind kind = WeightKind::Estimate;
  double p = 2.0;

  Eigen::Index size() const { return values.size(); }
  double operator[](Eigen::Index i) const { return values(i); }
  double sum() const { return values.sum(); }
  double max() const { return values.size() == 0 ? 0.0 : values.maxCoeff(); }
};

std::string to_string(WeightKind kind);

}  // namespace lpsens
