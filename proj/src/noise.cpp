#include "sdaerk/noise.hpp"

#include "sdaerk/errors.hpp"

#include <cmath>
#include <numbers>

namespace sdaerk {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace

NoiseIncrement NoiseIncrement::from_xi(double xi, double h) {
    if (!(h > 0.0)) throw NonpositiveStep(h);
    NoiseIncrement inc;
    inc.h = h;
    inc.i1 = std::sqrt(h) * xi;
    inc.i11 = 0.5 * (inc.i1 * inc.i1 - h);
    return inc;
}

NoiseStream::NoiseStream(std::uint64_t seed) : state_(seed) {
    // burn one output so trivially related seeds decorrelate
    splitmix64(state_);
}

NoiseStream::NoiseStream(std::uint64_t base_seed, std::uint64_t path_index)
    : state_(base_seed ^ (0x9e3779b97f4a7c15ull * (path_index + 1))) {
    splitmix64(state_);
}

std::uint64_t NoiseStream::next_bits() { return splitmix64(state_); }

double NoiseStream::uniform() {
    return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
}

double NoiseStream::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // u1 in (0, 1] keeps the log finite
    const double u1 =
        (static_cast<double>(next_bits() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(phi);
    has_cached_ = true;
    return r * std::cos(phi);
}

NoiseIncrement draw_increment(NoiseStream& stream, double h) {
    return NoiseIncrement::from_xi(stream.normal(), h);
}

NoiseIncrement coarsen_increments(std::span<const NoiseIncrement> fine) {
    if (fine.empty()) throw EmptyInput("increment sequence");
    double i1 = 0.0, h = 0.0;
    for (const NoiseIncrement& inc : fine) {
        i1 += inc.i1;
        h += inc.h;
    }
    NoiseIncrement coarse;
    coarse.i1 = i1;
    coarse.h = h;
    coarse.i11 = 0.5 * (i1 * i1 - h);
    return coarse;
}

} // namespace sdaerk
