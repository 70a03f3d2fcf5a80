#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace certinpaint {

/// M-channel real field on a W x H pixel lattice. Pixels are stored
/// row-major (index y * W + x) with the channels of a pixel contiguous.
class ImageField {
 public:
  ImageField() = default;
  ImageField(int width, int height, int channels, double fill = 0.0);
  /// Throws std::invalid_argument on a size mismatch or non-finite entry.
  ImageField(int width, int height, int channels, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int x, int y, int m) { return data_[index(x, y, m)]; }
  double operator()(int x, int y, int m) const { return data_[index(x, y, m)]; }

  std::span<double> pixel(std::size_t i) { return {data_.data() + i * channels_, std::size_t(channels_)}; }
  std::span<const double> pixel(std::size_t i) const {
    return {data_.data() + i * channels_, std::size_t(channels_)};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const ImageField& other) const {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }
  bool all_finite() const;

  friend bool operator==(const ImageField&, const ImageField&) = default;

 private:
  std::size_t index(int x, int y, int m) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + m;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Inpainting region D. A set flag marks a pixel whose data is missing.
/// At least one pixel must stay known.
class DamageMask {
 public:
  /// Empty D (pure denoising).
  DamageMask(int width, int height);
  /// Throws std::invalid_argument if every pixel is damaged or sizes differ.
  DamageMask(int width, int height, std::vector<std::uint8_t> damaged);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return damaged_.size(); }

  bool damaged(std::size_t i) const { return damaged_[i] != 0; }
  bool damaged(int x, int y) const { return damaged(static_cast<std::size_t>(y) * width_ + x); }
  std::size_t damaged_count() const;

  bool matches(const ImageField& u) const { return u.width() == width_ && u.height() == height_; }

  friend bool operator==(const DamageMask&, const DamageMask&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> damaged_;
};

/// Per-pixel 2 x M matrix: row 0 holds x-differences, row 1 y-differences.
/// Also used for dual fields (tau, sigma, test fields).
class GradientField {
 public:
  GradientField() = default;
  GradientField(int width, int height, int channels, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
  std::size_t stride() const { return 2 * static_cast<std::size_t>(channels_); }

  /// The 2M entries of pixel i, x-row first.
  std::span<double> at(std::size_t i) { return {data_.data() + i * stride(), stride()}; }
  std::span<const double> at(std::size_t i) const { return {data_.data() + i * stride(), stride()}; }

  double& dx(int x, int y, int m) { return data_[offset(x, y) + m]; }
  double dx(int x, int y, int m) const { return data_[offset(x, y) + m]; }
  double& dy(int x, int y, int m) { return data_[offset(x, y) + channels_ + m]; }
  double dy(int x, int y, int m) const { return data_[offset(x, y) + channels_ + m]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * stride();
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

using DualField = GradientField;

/// Forward differences, h = 1, zero one-sided difference on the far edges.
GradientField gradient(const ImageField& u);

/// Negative adjoint of gradient(): <gradient(u), p> = -<u, divergence(p)>.
ImageField divergence(const GradientField& p);

/// Pixelwise projection of the channel vector onto the closed ball of radius L.
ImageField clamp_to_ball(const ImageField& u, double radius);

double inner_product(const ImageField& a, const ImageField& b);
double inner_product(const GradientField& a, const GradientField& b);

/// max over pixels of the channel-Euclidean norm.
double sup_norm(const ImageField& u);

}  // namespace certinpaint
