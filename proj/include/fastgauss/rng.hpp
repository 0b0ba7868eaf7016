#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

namespace fastgauss {

/// Philox4x32-10 counter-based generator.
///
/// The 64-bit seed is the key and the 64-bit stream id occupies the upper
/// half of the 128-bit counter, so every (seed, stream) pair addresses its own
/// 2^64-block sequence and new streams cost nothing to create.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block encrypt(Block counter, Key key);
};

/// Single-owner random stream. Not safe to share between threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform();
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

Eigen::VectorXd draw_std_normal(RngStream& rng, Eigen::Index k);
double draw_uniform(RngStream& rng);
/// Gamma with the given shape and rate (mean shape/rate).
double draw_gamma(RngStream& rng, double shape, double rate);
double draw_exponential(RngStream& rng, double rate);

}  // namespace fastgauss
