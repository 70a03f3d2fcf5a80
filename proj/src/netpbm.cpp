#include "certinpaint/netpbm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

namespace certinpaint {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

class Cursor {
 public:
  Cursor(std::string_view bytes, std::size_t start) : bytes_(bytes), pos_(start) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (is_space(c)) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  /// Unsigned decimal preceded by optional whitespace/comments.
  std::uint32_t read_uint(const char* what) {
    skip_space_and_comments();
    if (at_end()) throw NetpbmError(std::string("unexpected end of data reading ") + what, pos_);
    const std::size_t start = pos_;
    std::uint64_t value = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + static_cast<std::uint64_t>(bytes_[pos_] - '0');
      if (value > 0xFFFFFFFFull) throw NetpbmError(std::string(what) + " out of range", start);
      ++pos_;
    }
    if (pos_ == start) throw NetpbmError(std::string("expected a decimal ") + what, start);
    if (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#') {
      throw NetpbmError(std::string("malformed ") + what, pos_);
    }
    return static_cast<std::uint32_t>(value);
  }

  unsigned char byte() { return static_cast<unsigned char>(bytes_[pos_++]); }
  char peek() const { return bytes_[pos_]; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_;
};

}  // namespace

NetpbmError::NetpbmError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

std::string_view magic(NetpbmFormat format) {
  switch (format) {
    case NetpbmFormat::kP2: return "P2";
    case NetpbmFormat::kP3: return "P3";
    case NetpbmFormat::kP5: return "P5";
    case NetpbmFormat::kP6: return "P6";
  }
  return "P5";
}

NetpbmImage parse_netpbm(std::string_view bytes) {
  if (bytes.empty()) throw NetpbmError("empty file", 0);
  if (bytes.size() < 2 || bytes[0] != 'P') throw NetpbmError("missing Netpbm magic number", 0);
  NetpbmImage img;
  switch (bytes[1]) {
    case '2': img.format = NetpbmFormat::kP2; break;
    case '3': img.format = NetpbmFormat::kP3; break;
    case '5': img.format = NetpbmFormat::kP5; break;
    case '6': img.format = NetpbmFormat::kP6; break;
    default: throw NetpbmError(std::string("unsupported magic number P") + bytes[1], 1);
  }
  Cursor cur(bytes, 2);
  auto offset = [&] { return cur.pos(); };
  if (cur.at_end() || !(is_space(cur.peek()) || cur.peek() == '#')) {
    throw NetpbmError("malformed magic number", offset());
  }

  const std::size_t w_at = offset();
  const std::uint32_t w = cur.read_uint("width");
  const std::uint32_t h = cur.read_uint("height");
  const std::uint32_t maxval = cur.read_uint("maxval");
  if (w == 0 || h == 0 || w > 1u << 20 || h > 1u << 20) {
    throw NetpbmError("image dimensions out of range", w_at);
  }
  if (maxval == 0 || maxval > 65535) throw NetpbmError("maxval must lie in [1, 65535]", offset());
  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.maxval = static_cast<int>(maxval);

  const std::size_t count = static_cast<std::size_t>(w) * h * img.channels();
  img.samples.resize(count);
  const bool binary = img.format == NetpbmFormat::kP5 || img.format == NetpbmFormat::kP6;
  if (binary) {
    if (cur.at_end()) throw NetpbmError("truncated header", offset());
    cur.byte();  // the single whitespace after maxval
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    if (cur.remaining() < count * bytes_per) {
      throw NetpbmError("truncated raster: expected " + std::to_string(count * bytes_per) +
                            " bytes, found " + std::to_string(cur.remaining()),
                        offset());
    }
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t at = offset();
      std::uint32_t v = cur.byte();
      if (bytes_per == 2) v = (v << 8) | cur.byte();
      if (v > maxval) throw NetpbmError("sample exceeds maxval", at);
      img.samples[i] = static_cast<std::uint16_t>(v);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      cur.skip_space_and_comments();
      const std::size_t at = offset();
      if (cur.at_end()) {
        throw NetpbmError("truncated raster: " + std::to_string(i) + " of " +
                              std::to_string(count) + " samples",
                          at);
      }
      const std::uint32_t v = cur.read_uint("sample");
      if (v > maxval) throw NetpbmError("sample exceeds maxval", at);
      img.samples[i] = static_cast<std::uint16_t>(v);
    }
  }
  return img;
}

NetpbmImage read_netpbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_netpbm(bytes);
}

std::string encode_netpbm(const NetpbmImage& image) {
  const std::size_t per_row = static_cast<std::size_t>(image.width) * image.channels();
  if (image.samples.size() != per_row * image.height) {
    throw std::invalid_argument("encode_netpbm: sample count does not match dimensions");
  }
  std::string out;
  out += magic(image.format);
  out += '\n' + std::to_string(image.width) + ' ' + std::to_string(image.height) + '\n' +
         std::to_string(image.maxval) + '\n';
  const bool binary = image.format == NetpbmFormat::kP5 || image.format == NetpbmFormat::kP6;
  if (binary) {
    const bool wide = image.maxval > 255;
    out.reserve(out.size() + image.samples.size() * (wide ? 2 : 1));
    for (std::uint16_t v : image.samples) {
      if (wide) out += static_cast<char>(v >> 8);
      out += static_cast<char>(v & 0xFF);
    }
  } else {
    for (int y = 0; y < image.height; ++y) {
      for (std::size_t k = 0; k < per_row; ++k) {
        if (k > 0) out += ' ';
        out += std::to_string(image.samples[y * per_row + k]);
      }
      out += '\n';
    }
  }
  return out;
}

void write_netpbm(const std::filesystem::path& path, const NetpbmImage& image) {
  const std::string bytes = encode_netpbm(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

ImageField to_field(const NetpbmImage& image) {
  std::vector<double> data(image.samples.size());
  const double scale = static_cast<double>(image.maxval);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = image.samples[i] / scale;
  return ImageField(image.width, image.height, image.channels(), std::move(data));
}

NetpbmImage from_field(const ImageField& field, NetpbmFormat format, int maxval) {
  if (maxval < 1 || maxval > 65535) throw std::invalid_argument("maxval must lie in [1, 65535]");
  NetpbmImage img;
  img.format = format;
  img.width = field.width();
  img.height = field.height();
  img.maxval = maxval;
  if (field.channels() != img.channels()) {
    throw std::invalid_argument("channel count " + std::to_string(field.channels()) +
                                " does not fit format " + std::string(magic(format)));
  }
  img.samples.resize(field.size());
  const auto values = field.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = std::clamp(values[i], 0.0, 1.0);
    // Default rounding mode: ties to even.
    img.samples[i] = static_cast<std::uint16_t>(std::nearbyint(v * maxval));
  }
  return img;
}

ImageField load_image(const std::filesystem::path& path) { return to_field(read_netpbm(path)); }

void save_image(const std::filesystem::path& path, const ImageField& field, NetpbmFormat format,
                int maxval) {
  write_netpbm(path, from_field(field, format, maxval));
}

DamageMask mask_from_netpbm(const NetpbmImage& image, int width, int height) {
  if (image.channels() != 1) throw std::invalid_argument("mask must be a PGM (P2/P5) image");
  if (image.width != width || image.height != height) {
    throw std::invalid_argument("mask dimensions " + std::to_string(image.width) + "x" +
                                std::to_string(image.height) + " do not match image " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
  std::vector<std::uint8_t> damaged(image.samples.size());
  for (std::size_t i = 0; i < damaged.size(); ++i) {
    // v / maxval >= 128 / 255, kept in integers.
    damaged[i] = static_cast<std::uint64_t>(image.samples[i]) * 255 >=
                         static_cast<std::uint64_t>(image.maxval) * 128
                     ? 1
                     : 0;
  }
  return DamageMask(width, height, std::move(damaged));
}

DamageMask load_mask(const std::filesystem::path& path, int width, int height) {
  return mask_from_netpbm(read_netpbm(path), width, height);
}

}  // namespace certinpaint
