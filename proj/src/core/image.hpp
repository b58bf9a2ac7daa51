#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/field.hpp"

namespace chinpaint {

enum class ImageFormat { Auto, PgmAscii, PgmBinary, Png };

// 8-bit grayscale raster, row 0 at the top.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

// Format is picked from the magic bytes (P2, P5, PNG). Throws
// UnsupportedFormat or Io.
GrayImage read_gray_image(const std::string& path);
// Format from the extension (.pgm -> P5, .png); Auto falls back to P5.
void write_gray_image(const GrayImage& img, const std::string& path, ImageFormat format = ImageFormat::Auto);

// Image rows map to the y axis top-down: pixel (i, row) lands on cell
// (i, ny - 1 - row). Throws DimensionMismatch if the sizes disagree.
Field image_to_field(const GrayImage& img, const Grid& grid);
GrayImage field_to_image(const Field& values01);

// Gray values in [0, 1] (pixel / 255).
Field load_image(const std::string& path, const Grid& grid);

// gray >= threshold -> +m_star, otherwise -m_star; 0 on D when mask_D is given.
Field binarize_to_phase(const Field& img, double m_star, double threshold = 0.5, const Field* mask_D = nullptr);

// chi_D from an image thresholded at 0.5. Throws EmptyOrFullMask unless
// 0 < |D| < |Omega|.
Field load_mask(const std::string& path, const Grid& grid);
void require_proper_mask(const Field& mask_D);

// Separable Gaussian blur (reflect padding, truncated at 4 sigma, sigma in
// cells) of the phase image, scaled by 1 - 1e-6. Throws InvalidArgument if
// the mean is not strictly inside (-1, 1).
Field initial_guess(const Field& f_phase, const Field& mask_D, double blur_sigma);

// u = (phi / m_star)/2 + 1/2 clipped to [0, 1], quantised round-half-up.
GrayImage phase_to_image(const Field& phi, double m_star);
void write_phase_image(const Field& phi, double m_star, const std::string& path);

}  // namespace chinpaint
