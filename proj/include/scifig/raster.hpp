#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace scifig {

// PNG-encoded raster handed to vision prompts.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> png;
  // Stable identity used for request fingerprints (digest of the source SVG
  // when rendered in-process, of the PNG bytes otherwise).
  std::string content_key;

  bool empty() const { return png.empty() || width <= 0 || height <= 0; }
};

}  // namespace scifig
