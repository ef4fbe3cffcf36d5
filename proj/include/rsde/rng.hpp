#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

namespace rsde {

// Counter-based Gaussian stream. The k-th raw word of stream (seed, path) is
// splitmix64(key(seed, path) + k * GAMMA); Gaussian variates come from
// Box-Muller on consecutive word pairs. A replay with the same (seed, path)
// reproduces the stream bit-exactly regardless of worker scheduling, and a
// perturbed run consuming the same call pattern sees identical increments.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t path_index)
      : key_(mix(seed ^ mix(path_index + 0x9e3779b97f4a7c15ULL))) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // Two uniforms per Box-Muller pair; u1 kept away from zero for the log.
    const double u1 = to_unit(word(counter_++));
    const double u2 = to_unit(word(counter_++));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

  void fill(Eigen::Ref<Eigen::VectorXd> out) {
    for (int i = 0; i < out.size(); ++i) out(i) = next();
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t word(std::uint64_t counter) const {
    return mix(key_ + counter * 0x9e3779b97f4a7c15ULL);
  }
  static double to_unit(std::uint64_t w) {
    // (0, 1]: 53 mantissa bits, shifted off zero.
    return (static_cast<double>(w >> 11) + 1.0) * 0x1.0p-53;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rsde
