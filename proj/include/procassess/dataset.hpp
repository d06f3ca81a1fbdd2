#pragma once

#include "procassess/manifest.hpp"
#include "procassess/perturb.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace procassess {

struct KindQuota {
    PerturbationKind kind = PerturbationKind::keep;
    /// Total samples of this kind, assigned to videos round-robin. Absent: one per video.
    std::optional<std::size_t> count;
};

struct SynthesisPlan {
    std::uint64_t root_seed = 0;
    double fps = 1.0;
    std::vector<KindQuota> quotas;
    std::string annotations_source;
};

struct SkippedSample {
    std::string video_id;
    PerturbationKind kind = PerturbationKind::keep;
    std::string reason;
};

struct SynthesisResult {
    DatasetManifest manifest;
    std::vector<SkippedSample> skipped;
};

/// Sample j of a kind uses video j mod |records| and seed derive_seed(root, kind, j).
/// Ids are "<video>__<kind>" on the first pass over the videos and
/// "<video>__<kind>__<pass>" afterwards. Videos a generator rejects are skipped.
[[nodiscard]] SynthesisResult synthesize_dataset(std::span<const AnnotationRecord> records,
                                                 const SynthesisPlan& plan);

}  // namespace procassess
