#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "hdrdist/noise_model.hpp"
#include "hdrdist/rowcol_noise.hpp"

namespace hdrdist {

// Contents of a `DXNM` model file: the six pixel tables and any number of
// row/column models (applied in stored order).
struct NoiseModelFile {
    PixelNoiseModel pixel;
    std::vector<RowColNoiseModel> rowcol;

    bool operator==(const NoiseModelFile&) const = default;
};

// Layout, all integers little-endian:
//   "DXNM" u16 version=1 u16 bit_depth u8 channels u8 exposures
//   per (c, e): u32 populated rows, per row: u16 y, u16 x_min, u16 length, f32[length]
// followed by tagged sections:
//   "RCNM" u8 axis (0 row, 1 column), then per-(c, e) tables as above
//   "META" u32 pair_count
void write_noise_models(std::ostream& out, const NoiseModelFile& models);
void write_noise_models(const std::filesystem::path& path, const NoiseModelFile& models);
NoiseModelFile read_noise_models(std::istream& in);
NoiseModelFile read_noise_models(const std::filesystem::path& path);

} // namespace hdrdist
