#include "mrxi/image_io.hpp"

#include "mrxi/errors.hpp"
#include "mrxi/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace mrxi::io {

namespace {

void require_2d(const PixelGrid& grid) {
  if (grid.dimension() != 2) throw ConfigError("image export supports 2D grids only");
}

int max_value(int bits) {
  if (bits == 8) return 255;
  if (bits == 16) return 65535;
  throw ConfigError("PGM depth must be 8 or 16 bits");
}

}  // namespace

PgmScaling auto_scaling(const DensityField& field, int bits) {
  PgmScaling s;
  s.bits = bits;
  s.low = std::min(0.0, field.values.size() ? field.values.minCoeff() : 0.0);
  s.high = field.values.size() ? field.values.maxCoeff() : 1.0;
  if (!(s.high > s.low)) s.high = s.low + 1.0;
  return s;
}

std::string encode_pgm(const DensityField& field, const PgmScaling& scaling) {
  require_2d(field.grid);
  const int maxval = max_value(scaling.bits);
  if (!(scaling.high > scaling.low)) throw ConfigError("PGM scaling needs high > low");
  const std::size_t nx = field.grid.nx();
  const std::size_t ny = field.grid.ny();
  std::string out = "P5\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n" + std::to_string(maxval) + "\n";
  const double span = scaling.high - scaling.low;
  for (std::size_t row = 0; row < ny; ++row) {
    const std::size_t j = ny - 1 - row;
    for (std::size_t i = 0; i < nx; ++i) {
      const double v = field.values[static_cast<Eigen::Index>(field.grid.index(i, j))];
      const double t = std::clamp((v - scaling.low) / span, 0.0, 1.0);
      const auto q = static_cast<unsigned>(std::lround(t * maxval));
      if (scaling.bits == 16) out.push_back(static_cast<char>((q >> 8) & 0xff));
      out.push_back(static_cast<char>(q & 0xff));
    }
  }
  return out;
}

DensityField decode_pgm(const std::string& bytes, const PgmScaling& scaling, const PixelGrid& layout) {
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  auto number = [&]() {
    const std::string t = token();
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) throw IoError("malformed PGM header");
    return v;
  };
  if (token() != "P5") throw IoError("only binary PGM (P5) is supported");
  const std::size_t nx = number();
  const std::size_t ny = number();
  const std::size_t maxval = number();
  ++pos;  // single whitespace byte before the raster
  if (maxval == 0 || maxval > 65535) throw IoError("PGM maxval out of range");
  if (layout.nx() != nx || layout.ny() != ny) throw IoError("PGM size does not match the expected grid");
  const std::size_t width = maxval > 255 ? 2 : 1;
  if (bytes.size() < pos + nx * ny * width) throw IoError("PGM raster is truncated");

  DensityField out = DensityField::zeros(layout);
  const double span = scaling.high - scaling.low;
  for (std::size_t row = 0; row < ny; ++row) {
    const std::size_t j = ny - 1 - row;
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t off = pos + (row * nx + i) * width;
      std::size_t q = static_cast<unsigned char>(bytes[off]);
      if (width == 2) q = (q << 8) | static_cast<unsigned char>(bytes[off + 1]);
      out.values[static_cast<Eigen::Index>(layout.index(i, j))] =
          scaling.low + span * static_cast<double>(q) / static_cast<double>(maxval);
    }
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const DensityField& field, const PgmScaling& scaling) {
  write_file_atomic(path, encode_pgm(field, scaling));
}

DensityField read_pgm(const std::filesystem::path& path, const PgmScaling& scaling, const PixelGrid& layout) {
  return decode_pgm(read_file(path), scaling, layout);
}

std::string pgm_sidecar(const PgmScaling& scaling, const PixelGrid& grid) {
  nlohmann::ordered_json j;
  j["format"] = "pgm";
  j["bits"] = scaling.bits;
  j["width"] = grid.nx();
  j["height"] = grid.ny();
  j["low"] = scaling.low;
  j["high"] = scaling.high;
  j["mapping"] = "value = low + (high - low) * sample / maxval";
  j["row_order"] = "first row is highest y";
  return j.dump(2) + "\n";
}

std::string format_grid_csv(const DensityField& field) {
  require_2d(field.grid);
  std::string out;
  for (std::size_t row = 0; row < field.grid.ny(); ++row) {
    const std::size_t j = field.grid.ny() - 1 - row;
    for (std::size_t i = 0; i < field.grid.nx(); ++i) {
      if (i) out += ',';
      out += format_double(field.values[static_cast<Eigen::Index>(field.grid.index(i, j))]);
    }
    out += '\n';
  }
  return out;
}

void write_grid_csv(const std::filesystem::path& path, const DensityField& field) {
  write_file_atomic(path, format_grid_csv(field));
}

DensityField parse_grid_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      double v = 0.0;
      auto [p, ec] = std::from_chars(line.data() + start, line.data() + end, v);
      if (ec != std::errc() || p != line.data() + end) throw IoError("CSV grid contains a non-numeric cell");
      row.push_back(v);
      start = end + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw IoError("CSV grid rows have unequal length");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("CSV grid is empty");
  const std::size_t ny = rows.size();
  const std::size_t nx = rows.front().size();
  DensityField out = DensityField::zeros(PixelGrid::square(nx, ny));
  for (std::size_t row = 0; row < ny; ++row) {
    for (std::size_t i = 0; i < nx; ++i) {
      out.values[static_cast<Eigen::Index>(out.grid.index(i, ny - 1 - row))] = rows[row][i];
    }
  }
  return out;
}

DensityField read_grid_csv(const std::filesystem::path& path) { return parse_grid_csv(read_file(path)); }

}  // namespace mrxi::io
