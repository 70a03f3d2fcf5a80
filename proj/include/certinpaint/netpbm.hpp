#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "certinpaint/grid.hpp"

namespace certinpaint {

enum class NetpbmFormat { kP2, kP3, kP5, kP6 };

/// Malformed, truncated or unsupported Netpbm data. offset() is the byte
/// position at which the problem was detected.
class NetpbmError : public std::runtime_error {
 public:
  NetpbmError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Raw samples of a PGM (1 channel) or PPM (3 channels) image.
struct NetpbmImage {
  NetpbmFormat format = NetpbmFormat::kP5;
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<std::uint16_t> samples;  ///< row-major, channels interleaved

  int channels() const {
    return format == NetpbmFormat::kP3 || format == NetpbmFormat::kP6 ? 3 : 1;
  }
};

/// Parses P2/P3/P5/P6 with maxval in [1, 65535]. Binary rasters with
/// maxval > 255 use two big-endian bytes per sample. Comments ('#' to end of
/// line) are accepted anywhere in the header and between ASCII samples.
NetpbmImage parse_netpbm(std::string_view bytes);
NetpbmImage read_netpbm(const std::filesystem::path& path);

/// Canonical encoding: "P?\n<w> <h>\n<maxval>\n" then the raster; ASCII
/// rasters put one image row per line.
std::string encode_netpbm(const NetpbmImage& image);
void write_netpbm(const std::filesystem::path& path, const NetpbmImage& image);

/// Intensities sample / maxval.
ImageField to_field(const NetpbmImage& image);

/// Clamps to [0, 1], scales by maxval and rounds half to even.
/// Throws std::invalid_argument if the channel count does not fit the format.
NetpbmImage from_field(const ImageField& field, NetpbmFormat format, int maxval);

ImageField load_image(const std::filesystem::path& path);
void save_image(const std::filesystem::path& path, const ImageField& field, NetpbmFormat format,
                int maxval);

/// Reads a PGM mask; samples >= 128/255 of maxval mark damaged pixels.
/// Throws std::invalid_argument on a dimension mismatch or an all-damaged
/// mask, NetpbmError on malformed input.
DamageMask load_mask(const std::filesystem::path& path, int width, int height);
DamageMask mask_from_netpbm(const NetpbmImage& image, int width, int height);

std::string_view magic(NetpbmFormat format);

}  // namespace certinpaint
