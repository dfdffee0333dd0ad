#pragma once

#include "mrxi/forward.hpp"

#include <filesystem>
#include <string>

namespace mrxi::io {

// Both image formats store a 2D field in display order: the first row is the
// highest y, pixels within a row run in increasing x.

/// Linear intensity mapping used for PGM export: pixel = round((v - low) / (high - low) * maxval).
struct PgmScaling {
  int bits = 16;
  double low = 0.0;
  double high = 1.0;
};

/// Binary PGM (P5), 8- or 16-bit (big-endian samples as the format requires).
std::string encode_pgm(const DensityField& field, const PgmScaling& scaling);
/// Decodes a P5 image and maps samples back through `scaling`.
DensityField decode_pgm(const std::string& bytes, const PgmScaling& scaling, const PixelGrid& layout);
void write_pgm(const std::filesystem::path& path, const DensityField& field, const PgmScaling& scaling);
DensityField read_pgm(const std::filesystem::path& path, const PgmScaling& scaling, const PixelGrid& layout);
/// Scaling from the field's range; low is min(0, min value).
PgmScaling auto_scaling(const DensityField& field, int bits = 16);
/// JSON sidecar text describing a PGM's scaling.
std::string pgm_sidecar(const PgmScaling& scaling, const PixelGrid& grid);

std::string format_grid_csv(const DensityField& field);
void write_grid_csv(const std::filesystem::path& path, const DensityField& field);
/// Parses a CSV grid onto a unit-square grid of matching shape.
DensityField read_grid_csv(const std::filesystem::path& path);
DensityField parse_grid_csv(const std::string& text);

}  // namespace mrxi::io
