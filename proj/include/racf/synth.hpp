#pragma once

// Synthetic sequences: a textured square moving over a smooth textured
// background, with exact ground truth. Pixel values are integers in 0..255 so
// a PNG round trip is lossless.

#include "racf/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace racf {

struct SynthSpec {
  std::string kind = "translate";  ///< translate | zoom | static
  int frames = 100;
  Index width = 320;
  Index height = 240;
  double target = 40.0;  ///< initial side, px
  double speed = 3.0;    ///< px per frame (translate)
  double rate = 1.01;    ///< side growth per frame (zoom)
  double noise = 2.0;    ///< per-pixel Gaussian noise, intensity units
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthSequence {
  std::vector<Image> frames;
  std::vector<BoundingBox> truth;  ///< 0-based corner coordinates
};

/// Ground truth only (cheap).
std::vector<BoundingBox> synth_truth(const SynthSpec& spec);

Image synth_frame(const SynthSpec& spec, int index);

SynthSequence make_synthetic(const SynthSpec& spec);

}  // namespace racf
