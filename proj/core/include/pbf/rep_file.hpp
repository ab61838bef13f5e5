#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pbf/carrier.hpp"

namespace pbf {

// A carrier basis together with the generators projected onto it; the unit
// persisted in a PBF-REP v1 file.
struct Representation {
  CarrierBasis basis;
  ProjectedOps projected;
};

inline constexpr std::string_view kRepMagic = "PBF-REP v1";

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

// Text of a PBF-REP v1 file. Doubles are written with 17 significant digits,
// which round-trips IEEE binary64 exactly.
std::string serialize_rep(const CarrierBasis& basis, const ProjectedOps& projected);

// Parses and re-validates a representation. Throws VersionError on a bad
// header line, ChecksumError on a digest mismatch, FormatError on malformed
// content, and ValidationError (or GradingError) when the decoded data breaks
// an invariant.
Representation parse_rep(std::string_view text);

void save_rep(const CarrierBasis& basis, const ProjectedOps& projected, const std::filesystem::path& path);
Representation load_rep(const std::filesystem::path& path);

}  // namespace pbf
