#include "mrxi/errors.hpp"
#include "mrxi/phantoms.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mrxi;

namespace {

const PhantomKind kAllKinds[] = {PhantomKind::PShape, PhantomKind::SheppLogan, PhantomKind::Tumor};

Vector random_field(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("phantom names round-trip") {
  for (PhantomKind kind : kAllKinds) CHECK(phantom_kind_from_string(to_string(kind)) == kind);
  CHECK(to_string(PhantomKind::PShape) == "p_shape");
  CHECK(to_string(PhantomKind::SheppLogan) == "shepp_logan");
  CHECK(to_string(PhantomKind::Tumor) == "tumor");
  CHECK_THROWS_AS(phantom_kind_from_string("banana"), ConfigError);
}

TEST_CASE("shepp-logan background is empty outside the skull") {
  const PhantomSpec spec = PhantomSpec::defaults(PhantomKind::SheppLogan);
  const auto& outer = std::get<SheppLogan>(spec.shape).ellipses.front();
  for (std::size_t n : {31u, 75u, 197u}) {
    const PixelGrid grid = PixelGrid::square(n, n);
    const DensityField f = rasterize(spec, grid);
    CHECK(f.nonnegative());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Vec3 p = grid.midpoint(k);
      if (!outer.contains(p.x(), p.y())) CHECK(f.values[static_cast<Eigen::Index>(k)] == 0.0);
    }
  }
  // clipping: the two dark ellipses sum to exactly zero in the modified table
  const DensityField f = rasterize(spec, PixelGrid::square(101, 101));
  CHECK(f.values.minCoeff() == 0.0);
  CHECK(f.values.maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("p-shape hole is empty while the stroke carries the intensity") {
  PhantomSpec spec = PhantomSpec::defaults(PhantomKind::PShape);
  auto& p = std::get<PShape>(spec.shape);
  p.intensity = 2.5;
  CHECK(spec.value_at(p.hole.cx, p.hole.cy) == 0.0);
  CHECK(spec.value_at(p.stem.cx, p.stem.cy) == 2.5);
  // bowl rim to the right of the hole
  CHECK(spec.value_at(p.bowl.cx + 0.9 * p.bowl.semi_x, p.bowl.cy) == 2.5);
  CHECK(spec.value_at(0.02, 0.02) == 0.0);

  const PixelGrid grid = PixelGrid::square(75, 75);
  const DensityField f = rasterize(spec, grid);
  std::size_t hole_cells = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec3 w = grid.midpoint(k);
    if (p.hole.contains(w.x(), w.y())) {
      ++hole_cells;
      CHECK(f.values[static_cast<Eigen::Index>(k)] == 0.0);
    }
  }
  CHECK(hole_cells > 20);
}

TEST_CASE("tumor vein is particle free") {
  const PhantomSpec spec = PhantomSpec::defaults(PhantomKind::Tumor);
  const auto& t = std::get<Tumor>(spec.shape);
  CHECK(spec.value_at(t.vein.cx, t.vein.cy) == 0.0);
  CHECK(spec.value_at(t.body.cx + 0.2, t.body.cy + 0.1) == t.intensity);
}

TEST_CASE("rasterized mass is stable under refinement") {
  for (PhantomKind kind : kAllKinds) {
    const PhantomSpec spec = PhantomSpec::defaults(kind);
    const double fine = rasterize(spec, PixelGrid::square(197, 197)).mass();
    const double coarse = rasterize(spec, PixelGrid::square(75, 75)).mass();
    CHECK(fine > 0.0);
    CHECK(std::abs(fine - coarse) / fine < 0.02);
  }
}

TEST_CASE("resampling") {
  std::mt19937_64 rng(17);
  SUBCASE("identity resolution") {
    const PixelGrid grid = PixelGrid::square(20, 20);
    const DensityField f(grid, random_field(rng, grid.size()));
    CHECK(resample(f, grid).values == f.values);
  }
  SUBCASE("constants stay constant") {
    const PixelGrid fine = PixelGrid::square(197, 197);
    const DensityField f(fine, Vector::Constant(static_cast<Eigen::Index>(fine.size()), 0.37));
    const DensityField c = resample(f, PixelGrid::square(75, 75));
    CHECK((c.values.array() - 0.37).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("exact 2:1 tiling takes block means") {
    const PixelGrid fine = PixelGrid::square(150, 150);
    const PixelGrid coarse = PixelGrid::square(75, 75);
    const DensityField f(fine, random_field(rng, fine.size()));
    const DensityField c = resample(f, coarse);
    for (std::size_t j = 0; j < 75; ++j) {
      for (std::size_t i = 0; i < 75; ++i) {
        double sum = 0.0;
        for (std::size_t dj = 0; dj < 2; ++dj)
          for (std::size_t di = 0; di < 2; ++di) sum += f.values[static_cast<Eigen::Index>(fine.index(2 * i + di, 2 * j + dj))];
        CHECK(c.values[static_cast<Eigen::Index>(coarse.index(i, j))] == doctest::Approx(sum / 4.0).epsilon(1e-15));
      }
    }
    CHECK(std::abs(c.mass() - f.mass()) <= 1e-12 * f.mass());
  }
  SUBCASE("non-nested grids conserve mass and sign") {
    const PixelGrid fine = PixelGrid::square(197, 197);
    const DensityField f(fine, random_field(rng, fine.size()));
    const DensityField c = resample(f, PixelGrid::square(75, 75));
    CHECK(c.nonnegative());
    CHECK(std::abs(c.mass() - f.mass()) <= 1e-2 * f.mass());
    // overlap weights tile the source exactly, so the mass agrees far more tightly
    CHECK(std::abs(c.mass() - f.mass()) <= 1e-12 * f.mass());
  }
  SUBCASE("mismatched extents are rejected") {
    const DensityField f = DensityField::zeros(PixelGrid::square(10, 10));
    const PixelGrid other(std::array<std::size_t, 3>{10, 10, 1}, Vec3(0, 0, 0), Vec3(2, 1, 0), 2);
    CHECK_THROWS_AS(resample(f, other), ConfigError);
  }
}

TEST_CASE("phantom validation") {
  PhantomSpec p = PhantomSpec::defaults(PhantomKind::PShape);
  std::get<PShape>(p.shape).intensity = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  PhantomSpec t = PhantomSpec::defaults(PhantomKind::Tumor);
  std::get<Tumor>(t.shape).body.cx = 1.2;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  PhantomSpec s{SheppLogan{}};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_THROWS_AS(rasterize(PhantomSpec::defaults(PhantomKind::Tumor), PixelGrid::cube(4, 4, 4)), ConfigError);
}
