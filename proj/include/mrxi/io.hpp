#pragma once

#include "mrxi/forward.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mrxi::io {

// Binary container (all integers and floats little-endian):
//
//   char[8]  magic "MRXIBIN\0"
//   u32      version (1)
//   u32      kind (1 = operator, 2 = vector)
//   u64      rows, u64 cols
//   u32      record count, then per record: char[4] tag, u64 byte length, payload
//   f64[rows * cols] entries, row-major
//
// Operator records: "ROWS" (rows x {u64 activation, u64 sensor}),
// "GRID" (u64 nx, ny, nz; u32 dimension; f64 lower[3], upper[3]),
// "META" (u8 langevin, u64 activations, u64 sensors).
inline constexpr char kMagic[8] = {'M', 'R', 'X', 'I', 'B', 'I', 'N', '\0'};
inline constexpr std::uint32_t kFormatVersion = 1;

enum class ContainerKind : std::uint32_t { Operator = 1, Vector = 2 };

std::string encode_operator(const ForwardOperator& op);
ForwardOperator decode_operator(std::string_view bytes);
std::string encode_vector(const Vector& v);
Vector decode_vector(std::string_view bytes);

void write_operator(const std::filesystem::path& path, const ForwardOperator& op);
ForwardOperator read_operator(const std::filesystem::path& path);
void write_vector_binary(const std::filesystem::path& path, const Vector& v);
Vector read_vector_binary(const std::filesystem::path& path);

/// One value per line, shortest round-trip decimal.
std::string format_vector_csv(const Vector& v);
void write_vector_csv(const std::filesystem::path& path, const Vector& v);
Vector read_vector_csv(const std::filesystem::path& path);
/// Dispatches on extension (.csv or .bin).
Vector read_vector(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string sha256_hex(std::string_view bytes);

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

}  // namespace mrxi::io
