#pragma once

#include "mrxi/types.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <random>

namespace mrxi {

/// Pass as snr_db to disable noise.
inline constexpr double kNoiselessSnr = std::numeric_limits<double>::infinity();

/// Standard normal samples from mt19937_64 via the Box-Muller transform.
///
/// std::normal_distribution is implementation-defined, so the transform is
/// spelled out here to keep noise reproducible across standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  /// Uniform in (0, 1] from the top 53 bits of one engine draw.
  double uniform_open();

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

struct Measurement {
  Vector data;
  std::optional<Vector> clean;
  std::optional<double> snr_db;
  std::optional<std::uint64_t> seed;
};

/// Adds i.i.d. zero-mean Gaussian noise with variance mean(g^2) * 10^(-snr_db / 10).
/// snr_db = +inf returns g unchanged.
Measurement add_gaussian_noise(const Vector& g, double snr_db, std::uint64_t seed);

/// 10 log10(|clean|^2 / |noisy - clean|^2).
double empirical_snr_db(const Vector& clean, const Vector& noisy);

}  // namespace mrxi
