#pragma once

#include <array>
#include <cstdint>

namespace markmle {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept;
};

/// Deterministic stream of uniforms addressed by (seed, stream, record).
/// Record i owns counter blocks [4i, 4i + 4), enough for eight doubles, so
/// records can be generated in any order or in parallel.
class RecordStream {
public:
    static constexpr std::uint64_t kBlocksPerRecord = 4;

    RecordStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t record) noexcept;

    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1): ((x >> 11) + 0.5) * 2^-53.
    double next_uniform();

private:
    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t block_;
    std::uint64_t block_end_;
    Philox4x32::Counter buffer_{};
    int used_ = 4;
};

}  // namespace markmle
