#include "mrxi/errors.hpp"
#include "mrxi/image_io.hpp"
#include "mrxi/io.hpp"

#include "test_support.hpp"

#include <json.hpp>

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>

using namespace mrxi;

TEST_CASE("shortest round-trip number formatting") {
  for (double x : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -1.7976931348623157e308}) {
    const std::string s = io::format_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(2.0) == "2");
}

TEST_CASE("vector containers round-trip bit-exactly") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  Vector v(257);
  for (auto& x : v) x = n(rng) * std::pow(10.0, n(rng) * 5);
  const auto dir = test_support::scratch_dir("io_vectors");

  io::write_vector_binary(dir / "v.bin", v);
  CHECK(io::read_vector_binary(dir / "v.bin") == v);
  io::write_vector_csv(dir / "v.csv", v);
  CHECK(io::read_vector_csv(dir / "v.csv") == v);
  CHECK(io::read_vector(dir / "v.csv") == v);
  CHECK(io::read_vector(dir / "v.bin") == v);
  CHECK(io::decode_vector(io::encode_vector(v)) == v);
}

TEST_CASE("operator container round-trips with metadata") {
  ForwardOperator op;
  op.grid = PixelGrid::square(3, 2);
  op.activation_count = 2;
  op.sensor_count = 2;
  op.langevin = false;
  op.matrix = Matrix::Random(4, 6);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t s = 0; s < 2; ++s) op.rows.push_back({a, s});

  const std::string bytes = io::encode_operator(op);
  CHECK(bytes.compare(0, 8, std::string(io::kMagic, 8)) == 0);
  const ForwardOperator back = io::decode_operator(bytes);
  CHECK(back.matrix == op.matrix);
  CHECK(back.grid == op.grid);
  CHECK(back.rows == op.rows);
  CHECK(back.activation_count == 2);
  CHECK(back.sensor_count == 2);
  CHECK_FALSE(back.langevin);

  const auto dir = test_support::scratch_dir("io_operator");
  io::write_operator(dir / "k.bin", op);
  CHECK(io::read_operator(dir / "k.bin").matrix == op.matrix);
}

TEST_CASE("corrupt containers are rejected") {
  const std::string good = io::encode_vector(Vector::Ones(4));
  CHECK_THROWS_AS(io::decode_vector(good.substr(0, good.size() - 3)), IoError);
  std::string bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(io::decode_vector(bad), IoError);
  CHECK_THROWS_AS(io::decode_operator(good), IoError);
  CHECK_THROWS_AS(io::read_vector_binary("/nonexistent/definitely/missing.bin"), IoError);
  const auto dir = test_support::scratch_dir("io_corrupt");
  io::write_file_atomic(dir / "bad.csv", "1\nnope\n");
  CHECK_THROWS_AS(io::read_vector_csv(dir / "bad.csv"), IoError);
}

TEST_CASE("atomic writes replace files and leave no temporaries") {
  const auto dir = test_support::scratch_dir("io_atomic");
  io::write_file_atomic(dir / "sub" / "a.txt", "first");
  io::write_file_atomic(dir / "sub" / "a.txt", "second");
  CHECK(io::read_file(dir / "sub" / "a.txt") == "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "sub")) ++entries;
  CHECK(entries == 1);
}

TEST_CASE("sha256 of known strings") {
  CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("PGM encoding") {
  const PixelGrid grid = PixelGrid::square(4, 3);
  DensityField f = DensityField::zeros(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) f.values[static_cast<Eigen::Index>(k)] = static_cast<double>(k) / 11.0;

  SUBCASE("16-bit header, byte order and display orientation") {
    const io::PgmScaling scale{16, 0.0, 1.0};
    const std::string bytes = io::encode_pgm(f, scale);
    const std::string header = "P5\n4 3\n65535\n";
    REQUIRE(bytes.substr(0, header.size()) == header);
    CHECK(bytes.size() == header.size() + 4 * 3 * 2);
    // first stored pixel is the top-left cell: i = 0, j = ny - 1 -> k = 8
    const auto hi = static_cast<unsigned char>(bytes[header.size()]);
    const auto lo = static_cast<unsigned char>(bytes[header.size() + 1]);
    CHECK(hi * 256 + lo == static_cast<int>(std::lround(8.0 / 11.0 * 65535)));
  }
  SUBCASE("quantized round trip") {
    for (int bits : {8, 16}) {
      const io::PgmScaling scale = io::auto_scaling(f, bits);
      const DensityField back = io::decode_pgm(io::encode_pgm(f, scale), scale, grid);
      const double step = (scale.high - scale.low) / ((1 << bits) - 1);
      CHECK((back.values - f.values).cwiseAbs().maxCoeff() <= 0.5 * step + 1e-15);
    }
  }
  SUBCASE("scaling validation") {
    CHECK_THROWS_AS(io::encode_pgm(f, {12, 0.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(io::encode_pgm(f, {16, 1.0, 1.0}), ConfigError);
    const DensityField flat = DensityField::zeros(grid);
    const io::PgmScaling s = io::auto_scaling(flat);
    CHECK(s.high > s.low);
  }
  SUBCASE("sidecar records the mapping") {
    const auto j = nlohmann::json::parse(io::pgm_sidecar({16, -1.0, 2.0}, grid));
    CHECK(j.at("bits") == 16);
    CHECK(j.at("low") == -1.0);
    CHECK(j.at("high") == 2.0);
  }
}

TEST_CASE("CSV grids round-trip") {
  const PixelGrid grid = PixelGrid::square(5, 2);
  DensityField f = DensityField::zeros(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) f.values[static_cast<Eigen::Index>(k)] = std::sqrt(static_cast<double>(k));
  const std::string text = io::format_grid_csv(f);
  // two rows of five values, top row first
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.substr(0, text.find(',')) == io::format_double(f.values[5]));
  const DensityField back = io::parse_grid_csv(text);
  CHECK(back.grid == grid);
  CHECK(back.values == f.values);
  CHECK_THROWS_AS(io::parse_grid_csv("1,2\n3\n"), IoError);
  CHECK_THROWS_AS(io::parse_grid_csv(""), IoError);
}
