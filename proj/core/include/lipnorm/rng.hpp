#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lipnorm {

// Deterministic random source. std::mt19937_64 output is fully specified by
// the standard and the transforms below avoid std::*_distribution, whose
// results are implementation-defined.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    size_t index(size_t n) { return static_cast<size_t>(gen_() % n); }

    double exponential() { return -std::log1p(-uniform()); }

    // Child stream for an independent task; keeps parallel work reproducible.
    Rng split(uint64_t tag) { return Rng(gen_() ^ (tag * 0x9e3779b97f4a7c15ULL)); }

private:
    std::mt19937_64 gen_;
};

} // namespace lipnorm
