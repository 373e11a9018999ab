#include "nsmooth/prox.hpp"

#include <cmath>

#include "nsmooth/errors.hpp"

namespace nsmooth {

EntropicSimplexProx::EntropicSimplexProx(std::size_t n) {
  if (n == 0) throw InvalidInput("simplex dimension must be positive");
  center_ = Vec::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
}

double EntropicSimplexProx::value(ConstVecRef y) const {
  double acc = std::log(static_cast<double>(center_.size()));
  for (Eigen::Index j = 0; j < y.size(); ++j)
    if (y[j] > 0.0) acc += y[j] * std::log(y[j]);
  return acc;
}

double EntropicSimplexProx::diameter() const {
  return std::log(static_cast<double>(center_.size()));
}

}  // namespace nsmooth
