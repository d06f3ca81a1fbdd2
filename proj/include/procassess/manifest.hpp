#pragma once

#include "procassess/perturb.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace procassess {

inline constexpr std::string_view kManifestSchema = "procassess.manifest";
inline constexpr int kManifestSchemaVersion = 1;

struct ManifestHeader {
    int schema_version = kManifestSchemaVersion;
    std::string rng = "splitmix64";
    std::uint64_t root_seed = 0;
    double fps = 1.0;
    std::string annotations;  ///< source annotation file, informational
};

struct DatasetManifest {
    ManifestHeader header;
    std::vector<PerturbedSample> samples;
};

/// JSON Lines. The first line is {"schema": ..., "header": {...}}; every
/// further line is one self-contained sample:
///   {"schema_version", "sample_id", "video_id", "kind", "seed", "fps",
///    "frame_plan": [index | null, ...], "ground_truth": {...}}
[[nodiscard]] std::string manifest_to_text(const DatasetManifest& manifest);
[[nodiscard]] DatasetManifest parse_manifest_text(std::string_view text,
                                                  std::string_view source = "<memory>");

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
[[nodiscard]] DatasetManifest read_manifest(const std::filesystem::path& path);

/// One sample line (no trailing newline).
[[nodiscard]] std::string sample_to_json_line(const PerturbedSample& sample);

}  // namespace procassess
