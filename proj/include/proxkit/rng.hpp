#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace proxkit {

/// Seedable generator whose output streams are identical on every platform.
///
/// Raw bits come from std::mt19937_64, whose sequence is fixed by the C++
/// standard. The standard distributions are implementation-defined, so the
/// uniform and normal transforms are implemented here: uniforms take the top
/// 53 bits, normals use the Marsaglia polar method with one cached spare.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+polar-normal";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal.
  double normal();

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derives an independent stream seed from (base, index) with the splitmix64
/// finalizer. Used wherever a run fans out into per-item seeds.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

}  // namespace proxkit
