#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "hdrdist/image.hpp"

namespace hdrdist {

// Portable float map. Grayscale images are written as `Pf`, colour as `PF`,
// little-endian (negative scale), rows stored bottom to top. Samples are
// stored as 32-bit floats; values that are not float-representable are
// rounded on write.
LinearImage read_pfm(std::istream& in);
LinearImage read_pfm(const std::filesystem::path& path);
void write_pfm(std::ostream& out, const LinearImage& image);
void write_pfm(const std::filesystem::path& path, const LinearImage& image);

// Several PFM images concatenated in one file.
std::vector<LinearImage> read_pfm_stack(const std::filesystem::path& path);
void write_pfm_stack(const std::filesystem::path& path, const std::vector<LinearImage>& images);

// Binary netpbm readings: `P5` for one channel, `P6` for three. Samples are
// big-endian 16-bit when maxval > 255. The bit depth is recorded in a
// `# bitdepth B` comment and the exposure layout in `# layout <axis> <parity>`.
QuantizedReading read_pgm16(std::istream& in);
QuantizedReading read_pgm16(const std::filesystem::path& path);
void write_pgm16(std::ostream& out, const QuantizedReading& reading);
void write_pgm16(const std::filesystem::path& path, const QuantizedReading& reading);

// Loads a frame or mosaic as normalized values: PFM as stored, netpbm
// readings dequantized to [0, 1]. Dispatches on the file magic.
LinearImage read_image(const std::filesystem::path& path);

} // namespace hdrdist
