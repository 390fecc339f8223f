#include "lumaforge/netpbm.hpp"

#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lumaforge/error.hpp"

namespace lumaforge::netpbm {

namespace {

class HeaderReader {
 public:
  HeaderReader(const std::string& bytes, const std::string& origin)
      : bytes_(bytes), origin_(origin) {}

  std::size_t next_number(const char* field) {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (value > (1u << 30)) fail(std::string("header ") + field + " out of range");
      ++pos_;
      ++digits;
    }
    if (digits == 0) fail(std::string("malformed header: expected ") + field);
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      fail("malformed header: missing separator before raster");
    }
    return pos_ + 1;
  }

  [[noreturn]] void fail(const std::string& what) const { throw IngestError(origin_ + ": " + what); }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  const std::string& origin_;
  std::size_t pos_ = 2;
};

template <typename Sample>
std::string encode_grid(const Grid<Sample>& frame, const char* magic) {
  std::string header = std::string(magic) + "\n" + std::to_string(frame.cols()) + " " +
                       std::to_string(frame.rows()) + "\n255\n";
  const std::size_t raster = frame.size() * sizeof(Sample);
  std::string out(header.size() + raster, '\0');
  std::memcpy(out.data(), header.data(), header.size());
  std::memcpy(out.data() + header.size(), frame.samples().data(), raster);
  return out;
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os.flush()) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

Image decode(const std::string& bytes, const std::string& origin) {
  HeaderReader reader(bytes, origin);
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    reader.fail("not a binary PGM/PPM (expected magic P5 or P6)");
  }
  const bool color = bytes[1] == '6';
  const std::size_t cols = reader.next_number("width");
  const std::size_t rows = reader.next_number("height");
  const std::size_t maxval = reader.next_number("maxval");
  if (rows == 0 || cols == 0) reader.fail("zero image dimension");
  if (maxval != 255) reader.fail("unsupported maxval " + std::to_string(maxval) + " (need 255)");
  const std::size_t start = reader.raster_start();
  const Dimensions dims{rows, cols};
  const std::size_t expected = dims.area() * (color ? 3 : 1);
  if (bytes.size() - start < expected) {
    reader.fail("truncated raster: expected " + std::to_string(expected) + " bytes, found " +
                std::to_string(bytes.size() - start));
  }
  if (color) {
    std::vector<Rgb> samples(dims.area());
    std::memcpy(samples.data(), bytes.data() + start, expected);
    return ColorBuffer(dims, std::move(samples));
  }
  std::vector<std::uint8_t> samples(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                                    bytes.begin() + static_cast<std::ptrdiff_t>(start + expected));
  return PixelBuffer(dims, std::move(samples));
}

std::string encode(const PixelBuffer& frame) { return encode_grid(frame, "P5"); }

std::string encode(const ColorBuffer& frame) {
  static_assert(sizeof(Rgb) == 3, "Rgb must be tightly packed");
  return encode_grid(frame, "P6");
}

Image read(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IngestError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << is.rdbuf();
  if (is.bad()) throw IngestError(path.string() + ": read failed");
  return decode(ss.str(), path.string());
}

ColorBuffer read_color(const std::filesystem::path& path) {
  Image img = read(path);
  if (auto* gray = std::get_if<PixelBuffer>(&img)) return to_color(*gray);
  return std::get<ColorBuffer>(std::move(img));
}

void write(const std::filesystem::path& path, const PixelBuffer& frame) {
  write_bytes(path, encode(frame));
}

void write(const std::filesystem::path& path, const ColorBuffer& frame) {
  write_bytes(path, encode(frame));
}

}  // namespace lumaforge::netpbm
