#include "mrxi/signal.hpp"

#include "mrxi/errors.hpp"

#include <cmath>
#include <numbers>

namespace mrxi {

double GaussianStream::uniform_open() {
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

Measurement add_gaussian_noise(const Vector& g, double snr_db, std::uint64_t seed) {
  if (g.size() == 0) throw NumericError("cannot add noise to an empty measurement");
  if (!g.allFinite()) throw NumericError("measurement has non-finite entries");
  Measurement m;
  m.clean = g;
  m.seed = seed;
  if (std::isinf(snr_db) && snr_db > 0) {
    m.data = g;
    m.snr_db = snr_db;
    return m;
  }
  if (!std::isfinite(snr_db)) throw ConfigError("SNR must be finite or +inf");
  const double power = g.squaredNorm() / static_cast<double>(g.size());
  if (!(power > 0.0)) throw NumericError("SNR is undefined for an all-zero signal");
  const double sigma = std::sqrt(power * std::pow(10.0, -snr_db / 10.0));
  GaussianStream stream(seed);
  m.data.resize(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) m.data[i] = g[i] + sigma * stream.next();
  m.snr_db = snr_db;
  return m;
}

double empirical_snr_db(const Vector& clean, const Vector& noisy) {
  if (clean.size() != noisy.size()) throw ConfigError("vectors differ in length");
  return 10.0 * std::log10(clean.squaredNorm() / (noisy - clean).squaredNorm());
}

}  // namespace mrxi
