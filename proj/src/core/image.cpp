#include "core/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "core/error.hpp"

namespace chinpaint {

namespace {

std::vector<std::uint8_t> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class PgmHeaderReader {
 public:
  PgmHeaderReader(const std::vector<std::uint8_t>& bytes, const std::string& path) : b_(bytes), path_(path) {}

  long next_int() {
    skip_space_and_comments();
    if (pos_ >= b_.size() || !std::isdigit(b_[pos_])) throw Error(ErrorCode::UnsupportedFormat, path_ + ": bad PGM header");
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_++] - '0');
      if (v > 1 << 24) throw Error(ErrorCode::UnsupportedFormat, path_ + ": PGM value too large");
    }
    return v;
  }
  std::size_t pos() const { return pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(b_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }
  const std::vector<std::uint8_t>& b_;
  const std::string& path_;
  std::size_t pos_ = 2;
};

GrayImage read_pgm(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  const bool binary = bytes[1] == '5';
  PgmHeaderReader rd(bytes, path);
  GrayImage img;
  img.width = static_cast<int>(rd.next_int());
  img.height = static_cast<int>(rd.next_int());
  const long maxval = rd.next_int();
  if (img.width <= 0 || img.height <= 0) throw Error(ErrorCode::UnsupportedFormat, path + ": empty PGM");
  if (maxval <= 0 || maxval > 255)
    throw Error(ErrorCode::UnsupportedFormat, path + ": only 8-bit PGM is supported (maxval " + std::to_string(maxval) + ")");
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(n);
  auto rescale = [&](long v) {
    if (v > maxval) throw Error(ErrorCode::UnsupportedFormat, path + ": sample exceeds maxval");
    return static_cast<std::uint8_t>(maxval == 255 ? v : std::lround(255.0 * v / maxval));
  };
  if (binary) {
    rd.skip(1);  // single whitespace after maxval
    if (bytes.size() < rd.pos() + n) throw Error(ErrorCode::UnsupportedFormat, path + ": truncated PGM");
    for (std::size_t k = 0; k < n; ++k) img.pixels[k] = rescale(bytes[rd.pos() + k]);
  } else {
    for (std::size_t k = 0; k < n; ++k) img.pixels[k] = rescale(rd.next_int());
  }
  return img;
}

GrayImage read_png(const std::string& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str()))
    throw Error(ErrorCode::UnsupportedFormat, path + ": " + png.message);
  if (png.format & PNG_FORMAT_FLAG_COLOR) {
    png_image_free(&png);
    throw Error(ErrorCode::UnsupportedFormat, path + ": colour PNG, expected grayscale");
  }
  png.format = PNG_FORMAT_GRAY;
  GrayImage img;
  img.width = static_cast<int>(png.width);
  img.height = static_cast<int>(png.height);
  img.pixels.resize(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, img.pixels.data(), 0, nullptr))
    throw Error(ErrorCode::UnsupportedFormat, path + ": " + png.message);
  return img;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  return std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(),
                    [](char a, char b) { return a == std::tolower(static_cast<unsigned char>(b)); });
}

}  // namespace

GrayImage read_gray_image(const std::string& path) {
  const std::vector<std::uint8_t> bytes = slurp(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) return read_pgm(bytes, path);
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return read_png(path);
  throw Error(ErrorCode::UnsupportedFormat, path + ": not a PGM (P2/P5) or PNG file");
}

void write_gray_image(const GrayImage& img, const std::string& path, ImageFormat format) {
  if (format == ImageFormat::Auto) format = ends_with(path, ".png") ? ImageFormat::Png : ImageFormat::PgmBinary;
  if (format == ImageFormat::Png) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.width);
    png.height = static_cast<png_uint_32>(img.height);
    png.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&png, path.c_str(), 0, img.pixels.data(), 0, nullptr))
      throw Error(ErrorCode::Io, path + ": " + png.message);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  if (format == ImageFormat::PgmAscii) {
    out << "P2\n" << img.width << ' ' << img.height << "\n255\n";
    for (int r = 0; r < img.height; ++r) {
      for (int c = 0; c < img.width; ++c) out << (c ? " " : "") << int(img.pixels[r * img.width + c]);
      out << '\n';
    }
  } else {
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  }
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

Field image_to_field(const GrayImage& img, const Grid& grid) {
  if (img.width != grid.nx || img.height != grid.ny)
    throw Error(ErrorCode::DimensionMismatch, "image is " + std::to_string(img.width) + "x" +
                                                  std::to_string(img.height) + ", grid is " + std::to_string(grid.nx) +
                                                  "x" + std::to_string(grid.ny));
  Field f(grid);
  for (int row = 0; row < img.height; ++row)
    for (int i = 0; i < img.width; ++i) f(i, grid.ny - 1 - row) = img.pixels[row * img.width + i] / 255.0;
  return f;
}

GrayImage field_to_image(const Field& values01) {
  const Grid& g = values01.grid();
  GrayImage img{g.nx, g.ny, std::vector<std::uint8_t>(g.size())};
  for (int row = 0; row < g.ny; ++row)
    for (int i = 0; i < g.nx; ++i) {
      const double u = std::clamp(values01(i, g.ny - 1 - row), 0.0, 1.0);
      img.pixels[row * g.nx + i] = static_cast<std::uint8_t>(std::floor(255.0 * u + 0.5));
    }
  return img;
}

Field load_image(const std::string& path, const Grid& grid) { return image_to_field(read_gray_image(path), grid); }

Field binarize_to_phase(const Field& img, double m_star, double threshold, const Field* mask_D) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw Error(ErrorCode::InvalidArgument, "binarize threshold must lie in (0, 1)");
  if (mask_D) require_same_grid(img.grid(), mask_D->grid(), "binarize_to_phase");
  Field phase(img.grid());
  for (std::size_t k = 0; k < phase.size(); ++k) {
    if (mask_D && (*mask_D)[k] == 1.0) continue;
    phase[k] = img[k] >= threshold ? m_star : -m_star;
  }
  return phase;
}

void require_proper_mask(const Field& mask_D) {
  std::size_t damaged = 0;
  for (double v : mask_D.values()) {
    if (v != 0.0 && v != 1.0) throw Error(ErrorCode::NonBinaryMask, "mask values must be 0 or 1");
    damaged += v == 1.0;
  }
  if (damaged == 0) throw Error(ErrorCode::EmptyOrFullMask, "damaged region D is empty");
  if (damaged == mask_D.size()) throw Error(ErrorCode::EmptyOrFullMask, "damaged region D covers the whole image");
}

Field load_mask(const std::string& path, const Grid& grid) {
  const Field img = load_image(path, grid);
  Field mask(grid);
  for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = img[k] >= 0.5 ? 1.0 : 0.0;
  require_proper_mask(mask);
  return mask;
}

namespace {

int reflect(int i, int n) {
  // half-sample symmetric: -1 -> 0, n -> n-1
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> w(2 * radius + 1);
  double sum = 0.0;
  for (int d = -radius; d <= radius; ++d) sum += w[d + radius] = std::exp(-0.5 * d * d / (sigma * sigma));
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

Field initial_guess(const Field& f_phase, const Field& mask_D, double blur_sigma) {
  require_same_grid(f_phase.grid(), mask_D.grid(), "initial_guess");
  if (!(blur_sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "blur_sigma must be nonnegative");
  const Grid& g = f_phase.grid();
  Field src(g);
  for (std::size_t k = 0; k < src.size(); ++k) src[k] = mask_D[k] == 1.0 ? 0.0 : f_phase[k];
  Field out = src;
  if (blur_sigma > 0.0) {
    const std::vector<double> w = gaussian_kernel(blur_sigma);
    const int radius = static_cast<int>(w.size() / 2);
    Field tmp(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double s = 0.0;
        for (int d = -radius; d <= radius; ++d) s += w[d + radius] * src(reflect(i + d, g.nx), j);
        tmp(i, j) = s;
      }
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double s = 0.0;
        for (int d = -radius; d <= radius; ++d) s += w[d + radius] * tmp(i, reflect(j + d, g.ny));
        out(i, j) = s;
      }
  }
  out *= 1.0 - 1e-6;
  double m = 0.0;
  for (double v : out.values()) m += v;
  m /= static_cast<double>(out.size());
  if (!(std::abs(m) < 1.0)) throw Error(ErrorCode::InvalidArgument, "initial guess mean must lie in (-1, 1)");
  return out;
}

GrayImage phase_to_image(const Field& phi, double m_star) {
  Field u(phi.grid());
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = 0.5 * (phi[k] / m_star) + 0.5;
  return field_to_image(u);
}

void write_phase_image(const Field& phi, double m_star, const std::string& path) {
  write_gray_image(phase_to_image(phi, m_star), path);
}

}  // namespace chinpaint
