// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/common.hpp"

#include <cmath>
#include <random>
#include <string_view>

namespace eovsim
{

// splitmix64, used only to spread (root seed, stream name) into a full
// mt19937_64 seed so that adding a node never perturbs other nodes' draws.
inline uint64_t
splitmix64(uint64_t& state)
{
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// One independent deterministic stream per (seed, stream name). All draws go
// through hand-rolled mappings rather than std::*_distribution, which the
// standard leaves implementation-defined.
class RngStream
{
  public:
    RngStream(uint64_t rootSeed, std::string_view streamName)
    {
        uint64_t mix = rootSeed ^ Digest().feed(streamName).value();
        // A couple of splitmix rounds decorrelates nearby seeds.
        splitmix64(mix);
        mGen.seed(splitmix64(mix));
    }

    uint64_t
    next_u64()
    {
        return mGen();
    }

    // Unbiased uniform draw in [0, n) by rejection.
    uint64_t
    below(uint64_t n)
    {
        if (n == 0)
        {
            throw SimError(ErrorKind::Invariant, "uniform draw below 0");
        }
        uint64_t const limit = UINT64_MAX - (UINT64_MAX % n);
        uint64_t x;
        do
        {
            x = mGen();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1).
    double
    unit()
    {
        return static_cast<double>(mGen() >> 11) * 0x1.0p-53;
    }

    bool
    chance(double p)
    {
        if (p <= 0.0)
        {
            return false;
        }
        if (p >= 1.0)
        {
            return true;
        }
        return unit() < p;
    }

    // Exponential interarrival with the given mean; never returns zero.
    double
    exponential(double mean)
    {
        double u = unit();
        return -mean * std::log1p(-u);
    }

  private:
    std::mt19937_64 mGen;
};

} // namespace eovsim
