#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace eitmc {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Stateless: every 128-bit counter block maps to 128 independent output bits,
// so streams can be indexed by (seed, stream, purpose, counter) and results
// do not depend on how work is split across threads.
struct Philox4x32 {
    static constexpr uint32_t kMul0 = 0xD2511F53u;
    static constexpr uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<uint32_t, 4> block(std::array<uint32_t, 2> key,
                                         std::array<uint32_t, 4> ctr) {
        for (int round = 0; round < 10; ++round) {
            const uint64_t p0 = static_cast<uint64_t>(kMul0) * ctr[0];
            const uint64_t p1 = static_cast<uint64_t>(kMul1) * ctr[2];
            const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
            const uint32_t lo0 = static_cast<uint32_t>(p0);
            const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
            const uint32_t lo1 = static_cast<uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// Purpose tags keep independent uses of the same (seed, stream) pair from
// colliding in counter space.
enum class StreamPurpose : uint32_t {
    increments = 0,
    start_sampling = 1,
    scratch = 2,
};

// A deterministic random stream identified by (seed, stream id, purpose).
// The block index advances by one per generated block; a fixed call sequence
// therefore yields identical numbers regardless of thread placement.
class RandomStream {
  public:
    RandomStream(uint64_t seed, uint64_t stream,
                 StreamPurpose purpose = StreamPurpose::increments)
        : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
          base_{0u, 0u, 0u, 0u} {
        base_[2] = static_cast<uint32_t>(stream);
        base_[3] = (static_cast<uint32_t>(stream >> 32) & 0x00FFFFFFu) |
                   (static_cast<uint32_t>(purpose) << 24);
    }

    // Two independent standard Gaussians via Box-Muller; consumes one block.
    std::pair<double, double> gaussian_pair() {
        const auto b = next_block();
        const double u1 = to_unit_open(b[0], b[1]);   // in (0,1]
        const double u2 = to_unit_halfopen(b[2], b[3]);  // in [0,1)
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    // Uniform double in [0,1); consumes one block per two calls.
    double uniform() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const auto b = next_block();
        cached_ = to_unit_halfopen(b[2], b[3]);
        have_cached_ = true;
        return to_unit_halfopen(b[0], b[1]);
    }

    uint64_t blocks_consumed() const { return block_index_; }

  private:
    std::array<uint32_t, 4> next_block() {
        std::array<uint32_t, 4> ctr = base_;
        ctr[0] = static_cast<uint32_t>(block_index_);
        ctr[1] = static_cast<uint32_t>(block_index_ >> 32);
        ++block_index_;
        return Philox4x32::block(key_, ctr);
    }

    // 53-bit mantissa assembled from two 32-bit words.
    static double to_unit_halfopen(uint32_t hi, uint32_t lo) {
        const uint64_t m = (static_cast<uint64_t>(hi) << 21) ^ (lo >> 11);
        return static_cast<double>(m) * 0x1.0p-53;
    }
    static double to_unit_open(uint32_t hi, uint32_t lo) {
        const uint64_t m = (static_cast<uint64_t>(hi) << 21) ^ (lo >> 11);
        return static_cast<double>(m + 1) * 0x1.0p-53;
    }

    std::array<uint32_t, 2> key_;
    std::array<uint32_t, 4> base_;
    uint64_t block_index_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace eitmc
