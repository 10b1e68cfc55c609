#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "perpress/periodic_orbits.hpp"
#include "perpress/rational_map.hpp"

namespace perpress {

/// FNV-1a hash of the map's exact coefficient bit patterns and degrees;
/// stable across runs and platforms with IEEE doubles.
std::uint64_t map_fingerprint(const RationalMap& map);

/// Path of the cache file holding period-n records for this map.
std::string cache_file_path(const std::string& dir, const RationalMap& map,
                            int n);

/// Append one versioned record (full point set plus the enumeration
/// report and the map coefficients for verification) to the cache file.
/// Creates the directory if needed. Throws std::runtime_error on I/O
/// failure.
void cache_store(const std::string& dir, const RationalMap& map,
                 const PeriodicSet& set);

struct CacheReadResult {
    std::optional<PeriodicSet> set;  ///< newest usable matching record
    bool salvaged = false;     ///< set came from a truncated final record
    int skipped_records = 0;   ///< truncated or corrupted records passed over
    int foreign_records = 0;   ///< fingerprint/coefficient mismatches ignored
};

/// Read the newest intact record for (map, n). A missing file is an empty
/// result, not an error. A final record cut off mid-append is salvaged
/// (its intact point lines load, the damaged line counts as skipped, and
/// the set is marked incomplete) unless an intact record exists; mid-file
/// damage is skipped outright.
CacheReadResult cache_load(const std::string& dir, const RationalMap& map,
                           int n);

}  // namespace perpress
