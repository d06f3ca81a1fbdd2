#include "procassess/annotations.hpp"
#include "procassess/dataset.hpp"
#include "procassess/errors.hpp"
#include "procassess/manifest.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace procassess;

namespace {

std::filesystem::path mini() { return std::filesystem::path(PROCASSESS_FIXTURES) / "mini" / "annotations.json"; }

AnnotationRecord record(const std::string& id, double duration, std::vector<std::pair<double, double>> spans) {
    std::vector<ActionSegment> segs;
    int k = 0;
    for (auto [a, b] : spans) segs.emplace_back(TimeInterval(a, b), "step " + std::to_string(k++));
    return AnnotationRecord(id, "proc", duration, std::move(segs));
}

std::string one_video(const std::string& segments) {
    return R"({"schema":"procassess.annotations","schema_version":1,"videos":[{"video_id":"x","procedure_label":"p","duration":10,"segments":[)" +
           segments + "]}]}";
}

std::string error_of(const std::string& text) {
    try {
        (void)parse_annotations_text(text);
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Annotations, MiniCorpusLoads) {
    const auto recs = parse_annotations(mini());
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_EQ(recs[0].video_id(), "vid_hand_hygiene");
    EXPECT_EQ(recs[1].segments().size(), 4u);
}

TEST(Annotations, RoundTrip) {
    const auto recs = parse_annotations(mini());
    const auto text = annotations_to_text(recs);
    EXPECT_EQ(parse_annotations_text(text), recs);
    EXPECT_EQ(annotations_to_text(parse_annotations_text(text)), text);
}

TEST(Annotations, UnsortedSegmentsLoadSorted) {
    const auto recs = parse_annotations_text(
        one_video(R"({"start":5,"end":8,"caption":"b"},{"start":0,"end":3,"caption":"a"})"));
    ASSERT_EQ(recs[0].segments().size(), 2u);
    EXPECT_EQ(recs[0].segments()[0].caption(), "a");
}

TEST(Annotations, ErrorsNameTheLocus) {
    auto msg = error_of(one_video(R"({"start":0,"end":3,"caption":"a"},{"start":5,"end":4,"caption":"b"})"));
    EXPECT_NE(msg.find("video 'x' segment 1"), std::string::npos) << msg;
    msg = error_of(one_video(R"({"start":0,"caption":"a"})"));
    EXPECT_NE(msg.find("video 'x' segment 0"), std::string::npos) << msg;
    msg = error_of(one_video(R"({"start":0,"end":30,"caption":"a"})"));
    EXPECT_NE(msg.find("video 'x'"), std::string::npos) << msg;
    EXPECT_FALSE(error_of("{oops").empty());
    EXPECT_FALSE(error_of(R"({"schema":"other","schema_version":1,"videos":[]})").empty());
    EXPECT_FALSE(error_of(R"({"schema":"procassess.annotations","schema_version":9,"videos":[]})").empty());
    EXPECT_THROW((void)parse_annotations("/nonexistent/a.json"), InputError);
}

TEST(Annotations, DuplicateVideoIdsRejected) {
    const std::string v = R"({"video_id":"x","procedure_label":"p","duration":10,"segments":[]})";
    EXPECT_THROW((void)parse_annotations_text(R"({"schema":"procassess.annotations","schema_version":1,"videos":[)" + v + "," + v + "]}"),
                 InputError);
}

TEST(Manifest, RoundTrip) {
    const auto recs = parse_annotations(mini());
    SynthesisPlan plan;
    plan.root_seed = 11;
    plan.quotas = {{PerturbationKind::mask, {}}, {PerturbationKind::swap, {}}, {PerturbationKind::shift, {}},
                   {PerturbationKind::keep, {}}};
    const auto m = synthesize_dataset(recs, plan).manifest;
    ASSERT_EQ(m.samples.size(), 12u);
    const auto text = manifest_to_text(m);
    const auto back = parse_manifest_text(text);
    EXPECT_EQ(manifest_to_text(back), text);
    EXPECT_EQ(back.header.root_seed, 11u);
    EXPECT_EQ(back.samples[0].frame_plan, m.samples[0].frame_plan);

    testutil::TempDir dir("manifest");
    write_manifest(dir / "m.jsonl", m);
    EXPECT_EQ(manifest_to_text(read_manifest(dir / "m.jsonl")), text);
}

TEST(Manifest, BadInput) {
    EXPECT_THROW((void)parse_manifest_text(""), InputError);
    EXPECT_THROW((void)parse_manifest_text("{\"schema\":\"nope\"}\n"), InputError);
    EXPECT_THROW((void)read_manifest("/nonexistent/m.jsonl"), InputError);
}

TEST(Synthesis, QuotasAcrossVideos) {
    std::vector<AnnotationRecord> recs;
    for (int v = 0; v < 4; ++v) recs.push_back(record("v" + std::to_string(v), 12, {{0, 3}, {3, 6}, {7, 11}}));
    SynthesisPlan plan;
    plan.root_seed = 5;
    plan.quotas = {{PerturbationKind::swap, 2}, {PerturbationKind::shift, 2}};
    const auto r = synthesize_dataset(recs, plan);
    ASSERT_EQ(r.manifest.samples.size(), 4u);
    EXPECT_EQ(r.manifest.samples[0].sample_id, "v0__swap");
    EXPECT_EQ(r.manifest.samples[3].sample_id, "v1__shift");
    EXPECT_TRUE(r.skipped.empty());
}

TEST(Synthesis, SameSeedSameManifest) {
    const auto recs = parse_annotations(mini());
    SynthesisPlan plan;
    plan.root_seed = 1234;
    plan.quotas = {{PerturbationKind::mask, 5}, {PerturbationKind::swap, 5}};
    const auto a = manifest_to_text(synthesize_dataset(recs, plan).manifest);
    const auto b = manifest_to_text(synthesize_dataset(recs, plan).manifest);
    EXPECT_EQ(a, b);
    plan.root_seed = 1235;
    EXPECT_NE(manifest_to_text(synthesize_dataset(recs, plan).manifest), a);
}

TEST(Synthesis, ExtraPassesGetSuffixedIds) {
    const auto recs = parse_annotations(mini());
    SynthesisPlan plan;
    plan.quotas = {{PerturbationKind::keep, 4}};
    const auto r = synthesize_dataset(recs, plan);
    ASSERT_EQ(r.manifest.samples.size(), 4u);
    EXPECT_EQ(r.manifest.samples[3].sample_id, "vid_hand_hygiene__keep__1");
}

TEST(Synthesis, IneligibleVideosAreSkipped) {
    std::vector<AnnotationRecord> recs{record("single", 10, {{2, 5}}), record("pair", 10, {{0, 3}, {4, 8}})};
    SynthesisPlan plan;
    plan.quotas = {{PerturbationKind::mask, {}}};
    const auto r = synthesize_dataset(recs, plan);
    ASSERT_EQ(r.manifest.samples.size(), 1u);
    ASSERT_EQ(r.skipped.size(), 1u);
    EXPECT_EQ(r.skipped[0].video_id, "single");
}

TEST(Synthesis, PlanValidation) {
    const auto recs = parse_annotations(mini());
    SynthesisPlan plan;
    EXPECT_THROW((void)synthesize_dataset(recs, plan), InvalidArgument);
    plan.quotas = {{PerturbationKind::swap, 1}, {PerturbationKind::swap, 1}};
    EXPECT_THROW((void)synthesize_dataset(recs, plan), InvalidArgument);
    plan.quotas = {{PerturbationKind::swap, 1}};
    EXPECT_THROW((void)synthesize_dataset(std::span<const AnnotationRecord>{}, plan), InvalidArgument);
}
