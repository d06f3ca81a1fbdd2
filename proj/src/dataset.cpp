#include "procassess/dataset.hpp"

#include "procassess/errors.hpp"
#include "procassess/rng.hpp"

#include <set>

namespace procassess {

SynthesisResult synthesize_dataset(std::span<const AnnotationRecord> records, const SynthesisPlan& plan) {
    if (records.empty()) throw InvalidArgument("no annotation records to perturb");
    if (plan.quotas.empty()) throw InvalidArgument("no perturbation kinds requested");
    if (!(plan.fps > 0.0)) throw InvalidArgument("fps must be positive");
    std::set<PerturbationKind> seen;
    for (const auto& q : plan.quotas) {
        if (!seen.insert(q.kind).second) {
            throw InvalidArgument("perturbation kind '" + std::string(to_string(q.kind)) + "' listed twice");
        }
    }

    SynthesisResult result;
    auto& header = result.manifest.header;
    header.root_seed = plan.root_seed;
    header.fps = plan.fps;
    header.rng = std::string(SplitMix64::kAlgorithmName);
    header.annotations = plan.annotations_source;

    for (const auto& q : plan.quotas) {
        const auto kind_name = std::string(to_string(q.kind));
        const std::size_t n = q.count.value_or(records.size());
        for (std::size_t j = 0; j < n; ++j) {
            const auto& rec = records[j % records.size()];
            const std::size_t pass = j / records.size();
            const auto seed = derive_seed(plan.root_seed, kind_name, j);
            try {
                PerturbedSample s;
                switch (q.kind) {
                    case PerturbationKind::mask: s = gen_mask(rec, seed, plan.fps); break;
                    case PerturbationKind::swap: s = gen_swap(rec, seed, std::nullopt, plan.fps); break;
                    case PerturbationKind::shift: s = gen_shift(rec, plan.fps); break;
                    case PerturbationKind::keep: s = gen_keep(rec, plan.fps); break;
                }
                s.seed = seed;
                s.sample_id = rec.video_id() + "__" + kind_name;
                if (pass > 0) s.sample_id += "__" + std::to_string(pass);
                result.manifest.samples.push_back(std::move(s));
            } catch (const InvalidArgument& e) {
                result.skipped.push_back({rec.video_id(), q.kind, e.what()});
            }
        }
    }
    return result;
}

}  // namespace procassess
