#pragma once

#include <cstdint>
#include <span>

namespace sdaerk {

/// Wiener increment I_(1) and double integral I_(1,1) = (I_(1)^2 - h)/2
/// over one step of size h.
struct NoiseIncrement {
    double i1 = 0.0;
    double i11 = 0.0;
    double h = 0.0;

    static NoiseIncrement from_xi(double xi, double h);
};

/// Deterministic counter-free normal source. Streams for distinct path
/// indices are derived from one base seed by splitmix64 mixing, so Monte
/// Carlo results do not depend on scheduling order.
class NoiseStream {
public:
    explicit NoiseStream(std::uint64_t seed);
    NoiseStream(std::uint64_t base_seed, std::uint64_t path_index);

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller; pairs are cached.
    double normal();

private:
    std::uint64_t next_bits();
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

NoiseIncrement draw_increment(NoiseStream& stream, double h);

/// Sums contiguous same-h fine increments into one coarse increment; i11
/// is recomputed from the coarse i1 so the defining identity holds exactly.
NoiseIncrement coarsen_increments(std::span<const NoiseIncrement> fine);

} // namespace sdaerk
