#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hoc/index.hpp"

namespace hoc {

/// One CSV row before scaling: raw id plus (lon, lat, timestamp) in whatever
/// units the source uses.
struct RawRecord {
    std::string id;
    double lon = 0;
    double lat = 0;
    double timestamp = 0;
};

/// Reads `id,lon,lat,timestamp` CSV (one header row, '.' decimal point).
/// Malformed rows raise parse_error with the offending line number.
std::vector<RawRecord> load_csv(const std::filesystem::path& path);

/// Writes objects in the same CSV schema, ids as unsigned integers and
/// coordinates in shortest round-trip form.
void write_csv(const std::filesystem::path& path, std::span<const STObject> objects);

/// Min-max scales every axis onto the config's domain: extreme input values
/// land exactly on the bounds. An axis where all inputs are equal maps to the
/// axis midpoint and appends a note to `warnings` when given. Ids are parsed
/// as unsigned integers.
std::vector<STObject> scale_to_domain(std::span<const RawRecord> records,
                                      const IndexConfig& cfg,
                                      std::vector<std::string>* warnings = nullptr);

/// n objects i.i.d. uniform over the domain; ids 0..n-1. Deterministic for a
/// fixed seed (mt19937_64; 53-bit uniforms built from raw generator output).
std::vector<STObject> gen_uniform(std::size_t n, std::uint64_t seed,
                                  const IndexConfig& cfg);

/// n objects Gaussian (sigma in domain units, all three axes) around
/// `clusters` uniformly placed centers, clamped to the domain; ids 0..n-1.
/// Deterministic for a fixed seed.
std::vector<STObject> gen_clustered(std::size_t n, std::size_t clusters, double sigma,
                                    std::uint64_t seed, const IndexConfig& cfg);

} // namespace hoc
