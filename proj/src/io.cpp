#include "mrxi/io.hpp"

#include "mrxi/errors.hpp"

#include <openssl/evp.h>

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mrxi::io {

namespace fs = std::filesystem;

namespace {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    std::memcpy(&v, buf, sizeof(T));
    return v;
  }
}

class Writer {
 public:
  template <typename T>
  void put(T v) {
    v = to_little(v);
    out_.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(v);
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw IoError("binary container is truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

struct Header {
  ContainerKind kind;
  std::uint64_t rows;
  std::uint64_t cols;
  std::vector<std::pair<std::string, std::string_view>> records;
};

void write_header(Writer& w, ContainerKind kind, std::uint64_t rows, std::uint64_t cols,
                  const std::vector<std::pair<std::string, std::string>>& records) {
  w.raw(std::string_view(kMagic, sizeof(kMagic)));
  w.put<std::uint32_t>(kFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(kind));
  w.put<std::uint64_t>(rows);
  w.put<std::uint64_t>(cols);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(records.size()));
  for (const auto& [tag, payload] : records) {
    w.raw(tag);
    w.put<std::uint64_t>(payload.size());
    w.raw(payload);
  }
}

Header read_header(Reader& r) {
  if (r.take(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) throw IoError("not an MRXI binary container");
  const auto version = r.get<std::uint32_t>();
  if (version != kFormatVersion) throw IoError("unsupported container version " + std::to_string(version));
  Header h;
  h.kind = static_cast<ContainerKind>(r.get<std::uint32_t>());
  h.rows = r.get<std::uint64_t>();
  h.cols = r.get<std::uint64_t>();
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string tag(r.take(4));
    const auto len = r.get<std::uint64_t>();
    h.records.emplace_back(std::move(tag), r.take(len));
  }
  return h;
}

void write_entries(Writer& w, const double* data, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    w.raw(std::string_view(reinterpret_cast<const char*>(data), n * sizeof(double)));
  } else {
    for (std::size_t i = 0; i < n; ++i) w.put<double>(data[i]);
  }
}

void read_entries(Reader& r, double* data, std::size_t n) {
  if (r.remaining() != n * sizeof(double)) throw IoError("binary container payload has the wrong size");
  for (std::size_t i = 0; i < n; ++i) data[i] = r.get<double>();
}

std::string_view find_record(const Header& h, std::string_view tag) {
  for (const auto& [t, payload] : h.records) {
    if (t == tag) return payload;
  }
  throw IoError("binary container lacks record " + std::string(tag));
}

}  // namespace

std::string encode_operator(const ForwardOperator& op) {
  Writer rows;
  for (const auto& key : op.rows) {
    rows.put<std::uint64_t>(key.activation);
    rows.put<std::uint64_t>(key.sensor);
  }
  Writer grid;
  for (auto c : op.grid.cells()) grid.put<std::uint64_t>(c);
  grid.put<std::uint32_t>(static_cast<std::uint32_t>(op.grid.dimension()));
  for (int a = 0; a < 3; ++a) grid.put<double>(op.grid.lower()[a]);
  for (int a = 0; a < 3; ++a) grid.put<double>(op.grid.upper()[a]);
  Writer meta;
  meta.put<std::uint8_t>(op.langevin ? 1 : 0);
  meta.put<std::uint64_t>(op.activation_count);
  meta.put<std::uint64_t>(op.sensor_count);

  Writer w;
  write_header(w, ContainerKind::Operator, op.row_count(), op.column_count(),
               {{"ROWS", rows.str()}, {"GRID", grid.str()}, {"META", meta.str()}});
  write_entries(w, op.matrix.data(), static_cast<std::size_t>(op.matrix.size()));
  return std::move(w.str());
}

ForwardOperator decode_operator(std::string_view bytes) {
  Reader r(bytes);
  const Header h = read_header(r);
  if (h.kind != ContainerKind::Operator) throw IoError("container does not hold an operator");

  ForwardOperator op;
  {
    Reader g(find_record(h, "GRID"));
    std::array<std::size_t, 3> cells{};
    for (auto& c : cells) c = g.get<std::uint64_t>();
    const auto dim = static_cast<int>(g.get<std::uint32_t>());
    Vec3 lo, hi;
    for (int a = 0; a < 3; ++a) lo[a] = g.get<double>();
    for (int a = 0; a < 3; ++a) hi[a] = g.get<double>();
    op.grid = PixelGrid(cells, lo, hi, dim);
  }
  {
    Reader m(find_record(h, "META"));
    op.langevin = m.get<std::uint8_t>() != 0;
    op.activation_count = m.get<std::uint64_t>();
    op.sensor_count = m.get<std::uint64_t>();
  }
  {
    Reader rr(find_record(h, "ROWS"));
    if (rr.remaining() != h.rows * 16) throw IoError("row map length does not match row count");
    op.rows.resize(h.rows);
    for (auto& key : op.rows) {
      key.activation = rr.get<std::uint64_t>();
      key.sensor = rr.get<std::uint64_t>();
    }
  }
  op.matrix.resize(static_cast<Eigen::Index>(h.rows), static_cast<Eigen::Index>(h.cols));
  read_entries(r, op.matrix.data(), h.rows * h.cols);
  try {
    op.validate();
  } catch (const Error& e) {
    throw IoError(std::string("corrupt operator container: ") + e.what());
  }
  return op;
}

std::string encode_vector(const Vector& v) {
  Writer w;
  write_header(w, ContainerKind::Vector, static_cast<std::uint64_t>(v.size()), 1, {});
  write_entries(w, v.data(), static_cast<std::size_t>(v.size()));
  return std::move(w.str());
}

Vector decode_vector(std::string_view bytes) {
  Reader r(bytes);
  const Header h = read_header(r);
  if (h.kind != ContainerKind::Vector || h.cols != 1) throw IoError("container does not hold a vector");
  Vector v(static_cast<Eigen::Index>(h.rows));
  read_entries(r, v.data(), h.rows);
  return v;
}

void write_operator(const fs::path& path, const ForwardOperator& op) { write_file_atomic(path, encode_operator(op)); }
ForwardOperator read_operator(const fs::path& path) { return decode_operator(read_file(path)); }
void write_vector_binary(const fs::path& path, const Vector& v) { write_file_atomic(path, encode_vector(v)); }
Vector read_vector_binary(const fs::path& path) { return decode_vector(read_file(path)); }

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw IoError("cannot format number");
  return std::string(buf, end);
}

std::string format_vector_csv(const Vector& v) {
  std::string out;
  out.reserve(static_cast<std::size_t>(v.size()) * 24);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out += format_double(v[i]);
    out += '\n';
  }
  return out;
}

void write_vector_csv(const fs::path& path, const Vector& v) { write_file_atomic(path, format_vector_csv(v)); }

Vector read_vector_csv(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<double> values;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), x);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": not a number");
    }
    values.push_back(x);
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Vector read_vector(const fs::path& path) {
  if (path.extension() == ".bin") return read_vector_binary(path);
  return read_vector_csv(path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return std::move(ss).str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 computation failed");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
  return os.str();
}

}  // namespace mrxi::io
