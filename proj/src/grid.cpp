#include "certinpaint/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace certinpaint {

namespace {

void check_dims(int width, int height, int channels) {
  if (width <= 0 || height <= 0 || channels <= 0) {
    throw std::invalid_argument("field dimensions must be positive, got " +
                                std::to_string(width) + "x" + std::to_string(height) + "x" +
                                std::to_string(channels));
  }
}

}  // namespace

ImageField::ImageField(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height, channels);
  data_.assign(pixel_count() * channels, fill);
}

ImageField::ImageField(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_dims(width, height, channels);
  if (data_.size() != pixel_count() * channels) {
    throw std::invalid_argument("ImageField: data length does not match dimensions");
  }
  if (!all_finite()) throw std::invalid_argument("ImageField: non-finite entry");
}

bool ImageField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DamageMask::DamageMask(int width, int height)
    : width_(width), height_(height), damaged_(static_cast<std::size_t>(width) * height, 0) {
  check_dims(width, height, 1);
}

DamageMask::DamageMask(int width, int height, std::vector<std::uint8_t> damaged)
    : width_(width), height_(height), damaged_(std::move(damaged)) {
  check_dims(width, height, 1);
  if (damaged_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("DamageMask: flag count does not match dimensions");
  }
  if (damaged_count() == damaged_.size()) {
    throw std::invalid_argument("mask damages entire domain");
  }
}

std::size_t DamageMask::damaged_count() const {
  return static_cast<std::size_t>(std::count_if(damaged_.begin(), damaged_.end(),
                                                [](std::uint8_t d) { return d != 0; }));
}

GradientField::GradientField(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height, channels);
  data_.assign(pixel_count() * stride(), fill);
}

GradientField gradient(const ImageField& u) {
  const int w = u.width(), h = u.height(), nc = u.channels();
  GradientField g(w, h, nc);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int m = 0; m < nc; ++m) {
        const double here = u(x, y, m);
        g.dx(x, y, m) = x + 1 < w ? u(x + 1, y, m) - here : 0.0;
        g.dy(x, y, m) = y + 1 < h ? u(x, y + 1, m) - here : 0.0;
      }
    }
  }
  return g;
}

ImageField divergence(const GradientField& p) {
  const int w = p.width(), h = p.height(), nc = p.channels();
  ImageField d(w, h, nc);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int m = 0; m < nc; ++m) {
        double v = 0.0;
        if (x + 1 < w) v += p.dx(x, y, m);
        if (x > 0) v -= p.dx(x - 1, y, m);
        if (y + 1 < h) v += p.dy(x, y, m);
        if (y > 0) v -= p.dy(x, y - 1, m);
        d(x, y, m) = v;
      }
    }
  }
  return d;
}

ImageField clamp_to_ball(const ImageField& u, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("clamp_to_ball: radius must be >= 0");
  ImageField out = u;
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    auto px = out.pixel(i);
    double norm2 = 0.0;
    for (double v : px) norm2 += v * v;
    const double norm = std::sqrt(norm2);
    if (norm > radius) {
      const double scale = radius / norm;
      for (double& v : px) v *= scale;
    }
  }
  return out;
}

double inner_product(const ImageField& a, const ImageField& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("inner_product: shape mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a.values()[i] * b.values()[i];
  return sum;
}

double inner_product(const GradientField& a, const GradientField& b) {
  if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels()) {
    throw std::invalid_argument("inner_product: shape mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) sum += a.values()[i] * b.values()[i];
  return sum;
}

double sup_norm(const ImageField& u) {
  double best = 0.0;
  for (std::size_t i = 0; i < u.pixel_count(); ++i) {
    double norm2 = 0.0;
    for (double v : u.pixel(i)) norm2 += v * v;
    best = std::max(best, std::sqrt(norm2));
  }
  return best;
}

}  // namespace certinpaint
