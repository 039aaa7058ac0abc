#pragma once

#include "racf/geometry.hpp"
#include "racf/segmentation.hpp"

#include <string>

namespace racf {

/// Reads an image file as RGB (or single-channel gray) intensities 0..255.
Image read_image(const std::string& path);

/// Writes `img` rounded and clamped to 8 bits; the format follows the extension.
void write_image(const std::string& path, const Image& img);

/// Foreground as 255, background as 0.
void write_mask(const std::string& path, const SegMask& mask);
SegMask mask_from_image(const Image& img);

/// Copy of `img` (promoted to RGB) with a one-pixel rectangle outline.
Image draw_box(const Image& img, const BoundingBox& box, double r = 255, double g = 0, double b = 0);

}  // namespace racf
