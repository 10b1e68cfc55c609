#pragma once

#include <cstdint>
#include <vector>

#include "perpress/potential.hpp"
#include "perpress/rational_map.hpp"

namespace perpress {

enum class SampleGenerator { inverse_iteration, boundary_scan };

/// Finite point cloud approximating the Julia set, tagged with how it was
/// produced so downstream artifacts can report provenance.
struct JuliaSample {
    std::vector<cplx> points;
    SampleGenerator generator = SampleGenerator::inverse_iteration;
    std::uint64_t seed = 0;
    int count = 0;  ///< requested size; points.size() == count
    int depth = 0;  ///< pull-back depth per chain
};

struct EscapeResult {
    bool escaped = false;
    int step = 0;  ///< first step past the radius, or iterations done
};

/// Escape-time classification for polynomial maps: iterate up to max_iter
/// steps or until |z| exceeds the map's escape radius. Rational maps have
/// no escape criterion; calling this on one throws std::invalid_argument.
EscapeResult escape_classify(const RationalMap& map, cplx z, int max_iter);

/// Sample the Julia set by pulling back a repelling fixed point through
/// randomly chosen inverse branches. Deterministic in (map, count, depth,
/// seed). Chains of length depth discard the first half as burn-in; chain
/// seeds derive from consecutive offsets of the given seed.
///
/// Throws std::invalid_argument for count < 1 or depth < 2, and
/// std::runtime_error if no repelling fixed point exists or an inverse
/// step fails to converge.
JuliaSample inverse_iteration_sample(const RationalMap& map, int count,
                                     int depth, std::uint64_t seed);

/// Minimum of a potential over the sample (the computable stand-in for
/// min over the Julia set, used by the empty-filter fallback). Throws on
/// an empty sample; a non-finite potential value (critical point in the
/// sample) propagates the potential's domain error.
double min_potential(const JuliaSample& sample, const RationalMap& map,
                     const Potential& phi);

}  // namespace perpress
