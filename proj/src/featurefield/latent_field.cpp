#include "geodiff/featurefield/latent_field.hpp"

#include <algorithm>
#include <string>

#include "geodiff/error.hpp"

namespace geodiff::ff {

LatentField::LatentField(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height <= 0 || width <= 0 || channels <= 0) {
    throw InputError("latent field dimensions must be positive, got " + std::to_string(height) + "x" +
                     std::to_string(width) + "x" + std::to_string(channels));
  }
  values_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

bool LatentField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace geodiff::ff
