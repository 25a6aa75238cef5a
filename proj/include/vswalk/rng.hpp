#pragma once

#include <array>
#include <cstdint>

namespace vswalk {

// Philox4x32-10 counter-based generator. The key is the user seed; the upper counter words
// carry a stream id, so every path (or Monte Carlo block) owns an independent stream and
// results do not depend on thread scheduling.
class Philox {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox(std::uint64_t seed, std::uint64_t stream);

  static Block round10(Block ctr, Key key);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1), 53 random bits.
  double uniform();
  double normal();

 private:
  Key key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::uint64_t buf_[2] = {0, 0};
  int buf_left_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Stream id namespaces so different consumers of one seed never share streams.
enum class StreamDomain : std::uint64_t { path = 0, monte_carlo = 1, euler = 2, test = 3 };

inline std::uint64_t stream_id(StreamDomain domain, std::uint64_t index) {
  return (static_cast<std::uint64_t>(domain) << 56) | index;
}

}  // namespace vswalk
