#pragma once

#include <array>
#include <cstdint>

namespace tether {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Tags keeping the substreams of different consumers apart.
enum class StreamPurpose : std::uint16_t {
    Initialisation = 1,
    SppOrientation = 2,
    ObstacleNoise = 3,
    MacroInitial = 4,
    OuNoise = 5,
    Test = 99,
};

/// Counter-based random stream keyed by (seed, entity, step). Draws depend
/// only on the key and the draw index, never on call order across entities,
/// so parallel loops reproduce serial results bit for bit.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t entity, std::uint64_t step) noexcept;
    RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index,
              std::uint64_t step) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform in the open interval (0, 1).
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Standard normal (Box-Muller).
    double normal() noexcept;

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Seed for child run `index` of a master seed (sweep cells, replicates).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

}  // namespace tether
