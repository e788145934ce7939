#include "sace/rng.hpp"

#include <cmath>

namespace sace {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  return static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 4>& counter,
                                        const std::array<std::uint64_t, 2>& key) {
  std::array<std::uint64_t, 4> x = counter;
  std::uint64_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, hi1;
    const std::uint64_t lo0 = mulhilo(kMul0, x[0], hi0);
    const std::uint64_t lo1 = mulhilo(kMul1, x[2], hi1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return x;
}

namespace {

// 53-bit mantissa mappings; u_log in (0,1] so the log is always finite.
inline double to_unit_open(std::uint64_t x) {
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}
inline double to_unit_halfopen(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

constexpr double kTwoPi = 6.28318530717958647692;

inline void box_muller(std::uint64_t a, std::uint64_t b, double& g0, double& g1) {
  const double r = std::sqrt(-2.0 * std::log(to_unit_open(a)));
  const double t = kTwoPi * to_unit_halfopen(b);
  g0 = r * std::cos(t);
  g1 = r * std::sin(t);
}

}  // namespace

void RngStream::fill_gaussians(DrawTag tag, std::uint64_t index,
                               std::span<double> out) const {
  const std::array<std::uint64_t, 2> key{master_seed_, stream_id_};
  const std::size_t n = out.size();
  for (std::size_t block = 0; block * 4 < n; ++block) {
    const std::array<std::uint64_t, 4> ctr{index, block,
                                           static_cast<std::uint64_t>(tag), 0};
    const auto x = philox4x64(ctr, key);
    double g[4];
    box_muller(x[0], x[1], g[0], g[1]);
    box_muller(x[2], x[3], g[2], g[3]);
    for (std::size_t i = 0; i < 4 && block * 4 + i < n; ++i) out[block * 4 + i] = g[i];
  }
}

double RngStream::uniform(DrawTag tag, std::uint64_t index, int slot) const {
  const std::array<std::uint64_t, 2> key{master_seed_, stream_id_};
  const std::array<std::uint64_t, 4> ctr{index, 0, static_cast<std::uint64_t>(tag), 1};
  const auto x = philox4x64(ctr, key);
  return to_unit_halfopen(x[static_cast<std::size_t>(slot) & 3]);
}

}  // namespace sace
