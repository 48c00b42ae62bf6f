#pragma once

// Counter-based generator (Philox4x32-10). Every draw is a pure function of
// a key (derived from the master seed) and a 128-bit counter, so streams
// can be addressed directly instead of advanced.

#include <array>
#include <cstdint>

namespace ralloc {

using Counter4 = std::array<std::uint32_t, 4>;
using Key2 = std::array<std::uint32_t, 2>;

inline Counter4 philox4x32(Counter4 ctr, Key2 key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t p0 = std::uint64_t(M0) * ctr[0];
    std::uint64_t p1 = std::uint64_t(M1) * ctr[2];
    Counter4 next{std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
                  std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
    ctr = next;
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

inline Key2 key_from_seed(std::uint64_t seed) {
  return {std::uint32_t(seed), std::uint32_t(seed >> 32)};
}

// 53-bit uniform strictly inside (0,1)
inline double bits_to_open01(std::uint32_t hi, std::uint32_t lo) {
  // 52 bits so that (x + 0.5) / 2^52 stays exactly representable below 1
  std::uint64_t x = (std::uint64_t(hi) << 32 | lo) >> 12;
  return (double(x) + 0.5) * 0x1.0p-52;
}

// stream purposes occupy the top byte of the first counter word
enum class StreamPurpose : std::uint32_t {
  duration = 1,
  policy = 2,
  choice = 3,
  trial_seed = 4,
  process = 5,
  stochastic_reward = 6,
  generator = 7,
};

inline std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose, std::uint64_t a,
                                 std::uint64_t b = 0) {
  Counter4 c{(std::uint32_t(purpose) << 24), std::uint32_t(a), std::uint32_t(a >> 32),
             std::uint32_t(b)};
  auto r = philox4x32(c, key_from_seed(master));
  return std::uint64_t(r[0]) << 32 | r[1];
}

// Two uniforms addressed by (purpose, w0, w1, w2). w0 must fit in 24 bits.
inline std::array<double, 2> keyed_uniforms(std::uint64_t seed, StreamPurpose purpose,
                                            std::uint32_t w0, std::uint32_t w1, std::uint32_t w2) {
  Counter4 c{(std::uint32_t(purpose) << 24) | (w0 & 0xFFFFFFu), w1, w2, 0};
  auto r = philox4x32(c, key_from_seed(seed));
  return {bits_to_open01(r[0], r[1]), bits_to_open01(r[2], r[3])};
}

// Sequential view over a stream identified by (purpose, a, b); the draw index
// is the last counter word.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, StreamPurpose purpose, std::uint32_t a, std::uint32_t b)
      : key_(key_from_seed(seed)), hi_((std::uint32_t(purpose) << 24)), a_(a), b_(b) {}

  double uniform() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    auto r = philox4x32(Counter4{hi_, a_, b_, idx_++}, key_);
    spare_ = bits_to_open01(r[2], r[3]);
    have_spare_ = true;
    return bits_to_open01(r[0], r[1]);
  }

  std::uint64_t next_u64() {
    have_spare_ = false;
    auto r = philox4x32(Counter4{hi_, a_, b_, idx_++}, key_);
    return std::uint64_t(r[0]) << 32 | r[1];
  }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return std::uint64_t(uniform() * double(n)) % n; }

 private:
  Key2 key_;
  std::uint32_t hi_, a_, b_;
  std::uint32_t idx_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ralloc
