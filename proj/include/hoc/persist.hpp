#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hoc/index.hpp"

namespace hoc {

inline constexpr std::array<std::uint8_t, 8> kIndexMagic = {'H', 'O', 'C', 'I',
                                                            'N', 'D', 'E', 'X'};
inline constexpr std::uint32_t kIndexFormatVersion = 1;
inline constexpr std::uint32_t kIndexFlagMbrTags = 1u << 0;
inline constexpr std::size_t kIndexHeaderSize = 96;

/// Serializes the tree into the binary index format: little endian
/// throughout, a fixed 96-byte header, nodes in depth-first pre-order with an
/// 8-bit child presence mask. `with_mbr_tags` controls whether the 16-byte
/// leaf tags are stored; load() recomputes missing tags from the entries.
std::vector<std::uint8_t> serialize(const HocTree& tree, bool with_mbr_tags = true);

/// Parses bytes produced by serialize. The payload checksum is verified
/// before any node is materialized.
HocTree deserialize(std::span<const std::uint8_t> bytes);

/// Writes serialize(tree) to `path`; returns the byte count.
std::size_t save(const HocTree& tree, const std::filesystem::path& path,
                 bool with_mbr_tags = true);

/// Loads an index file written by save.
HocTree load(const std::filesystem::path& path);

} // namespace hoc
