#include "procassess/errors.hpp"
#include "procassess/image.hpp"
#include "procassess/media.hpp"

#include "json.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace procassess;

namespace {
Frame frame(int w, int h, std::int64_t index, double fps = 1.0) {
    return {index, static_cast<double>(index) / fps, testutil::pattern(w, h, static_cast<int>(index))};
}
}  // namespace

TEST(Png, RoundTripsPixels) {
    testutil::TempDir tmp("png");
    const auto img = testutil::pattern(13, 7, 3);
    write_png(tmp / "a.png", img);
    EXPECT_EQ(read_png(tmp / "a.png"), img);
    EXPECT_EQ(read_png_size(tmp / "a.png"), std::make_pair(13, 7));
    EXPECT_THROW((void)read_png(tmp / "missing.png"), InputError);
    std::ofstream(tmp / "junk.png") << "not a png";
    EXPECT_THROW((void)read_png(tmp / "junk.png"), InputError);
}

TEST(Resize, IdentityAndConstantImages) {
    const auto img = testutil::pattern(10, 6, 1);
    EXPECT_EQ(resize_bilinear(img, 10, 6), img);
    Raster flat(8, 8);
    flat.fill_rect(0, 0, 8, 8, 10, 20, 30);
    const auto small = resize_bilinear(flat, 3, 3);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 3; ++x) {
            EXPECT_EQ(small.pixel(x, y)[0], 10);
            EXPECT_EQ(small.pixel(x, y)[2], 30);
        }
    }
}

TEST(Timestamp, Format) {
    EXPECT_EQ(format_timestamp(3.5), "03:500");
    EXPECT_EQ(format_timestamp(0.0), "00:000");
    EXPECT_EQ(format_timestamp(12.345), "12:345");
    EXPECT_EQ(format_timestamp(59.9996), "60:000");
    EXPECT_EQ(format_timestamp(125.0), "125:000");
    EXPECT_EQ(format_timestamp(2.25, "%d.%03d s"), "2.250 s");
    EXPECT_THROW((void)format_timestamp(1.0, "%02d"), InvalidArgument);
    EXPECT_THROW((void)format_timestamp(1.0, "%s:%d"), InvalidArgument);
    EXPECT_THROW((void)format_timestamp(-1.0), InvalidArgument);
}

TEST(Overlay, ChangesOnlyPixelsInsideTheBox) {
    const auto f = frame(160, 90, 7);
    const auto out = render_timestamp(f);
    EXPECT_EQ(f.pixels, testutil::pattern(160, 90, 7));  // input untouched
    const auto box = overlay_box("07:000", 160, 90);
    EXPECT_EQ(box.x, 4);
    EXPECT_EQ(box.y, 4);
    EXPECT_LE(box.width * 4, 160);
    bool changed = false;
    for (int y = 0; y < 90; ++y) {
        for (int x = 0; x < 160; ++x) {
            const bool same = std::equal(out.pixels.pixel(x, y), out.pixels.pixel(x, y) + 3, f.pixels.pixel(x, y));
            if (!box.contains(x, y)) ASSERT_TRUE(same) << x << "," << y;
            changed = changed || !same;
        }
    }
    EXPECT_TRUE(changed);
}

TEST(Overlay, BoxNeverExceedsAQuarterOfTheWidth) {
    for (int w = 40; w <= 2000; w += 7) {
        for (const char* label : {"00:000", "12:345", "125:000"}) {
            try {
                const auto box = overlay_box(label, w, 200);
                ASSERT_LE(box.width * 4, w) << w << " " << label;
                ASSERT_LE(box.x + box.width, w);
            } catch (const InvalidArgument&) {
                // Only allowed when not even the compact face fits.
                OverlayStyle compact;
                compact.font = OverlayFont::compact;
                compact.scale = 1;
                EXPECT_THROW((void)overlay_box(label, w, 200, compact), InvalidArgument) << w;
            }
        }
    }
}

TEST(Overlay, AutomaticPicksLargestFittingFace) {
    const auto big = overlay_box("00:000", 640, 360);
    const auto mid = overlay_box("00:000", 160, 90);
    const auto tiny = overlay_box("00:000", 100, 80);
    EXPECT_GT(big.height, mid.height);
    EXPECT_GE(mid.height, tiny.height);
    EXPECT_LE(tiny.width, 25);
}

TEST(Overlay, TooSmallFrameIsRejected) {
    EXPECT_THROW((void)render_timestamp(frame(40, 20, 0)), InvalidArgument);
    OverlayStyle fixed;
    fixed.font = OverlayFont::standard;
    fixed.scale = 3;
    EXPECT_THROW((void)overlay_box("00:000", 160, 90, fixed), InvalidArgument);
}

TEST(Overlay, VisibleOnBlankedFrames) {
    Frame blank{5, 5.0, Raster(160, 90)};
    const auto out = render_timestamp(blank);
    const auto box = overlay_box("05:000", 160, 90);
    bool lit = false;
    for (int y = 0; y < 90; ++y) {
        for (int x = 0; x < 160; ++x) {
            const auto* p = out.pixels.pixel(x, y);
            const bool nonzero = p[0] || p[1] || p[2];
            if (!box.contains(x, y)) ASSERT_FALSE(nonzero);
            lit = lit || nonzero;
        }
    }
    EXPECT_TRUE(lit);
}

TEST(SampleFrames, TimestampsFollowFps) {
    testutil::TempDir tmp("sample");
    testutil::write_frames(tmp / "ten", 10, 8, 6);
    const auto ten = sample_frames(tmp / "ten");
    ASSERT_EQ(ten.size(), 10u);
    for (int i = 0; i < 10; ++i) {
        EXPECT_EQ(ten[i].index, i);
        EXPECT_DOUBLE_EQ(ten[i].timestamp, i);
    }
    testutil::write_frames(tmp / "four", 4, 8, 6);
    const auto four = sample_frames(tmp / "four", 2.0);
    EXPECT_DOUBLE_EQ(four[1].timestamp, 0.5);
    EXPECT_DOUBLE_EQ(four[3].timestamp, 1.5);
}

TEST(SampleFrames, RejectsEmptyMissingAndGappedDirectories) {
    testutil::TempDir tmp("sample_bad");
    std::filesystem::create_directories(tmp / "empty");
    EXPECT_THROW((void)sample_frames(tmp / "empty"), InputError);
    EXPECT_THROW((void)sample_frames(tmp / "absent"), InputError);
    testutil::write_frames(tmp / "gap", 4, 8, 6);
    std::filesystem::remove(tmp.path() / "gap" / frame_file_name(2));
    EXPECT_THROW((void)sample_frames(tmp / "gap"), InputError);
    EXPECT_THROW((void)sample_frames(tmp / "gap", 0.0), InvalidArgument);
}

TEST(Storyboard, ConcatenatesTilesLeftToRight) {
    std::vector<Frame> frames;
    for (int i = 0; i < 5; ++i) frames.push_back(frame(100, 80, i));
    const auto board = compose_storyboard(frames);
    EXPECT_EQ(board.image.width(), 500);
    EXPECT_EQ(board.image.height(), 80);
    int x = 0;
    for (const auto& t : board.tiles) {
        EXPECT_EQ(t.x, x);
        EXPECT_EQ(t.y, 0);
        x += t.width;
    }
}

TEST(Storyboard, SingleFrameEqualsOverlaidFrame) {
    const auto f = frame(120, 90, 3);
    const auto board = compose_storyboard({f});
    EXPECT_EQ(board.image, render_timestamp(f).pixels);
}

TEST(Storyboard, ScalesToTheSmallestHeight) {
    std::vector<Frame> frames{frame(100, 80, 0), frame(200, 160, 1), frame(100, 80, 2)};
    const auto board = compose_storyboard(frames);
    EXPECT_EQ(board.image.height(), 80);
    EXPECT_EQ(board.tiles[1].width, 100);
    EXPECT_EQ(board.image.width(), 300);
    EXPECT_THROW((void)compose_storyboard({}), InvalidArgument);
}

TEST(Storyboard, WrapsRowsPastMaxWidth) {
    std::vector<Frame> frames;
    for (int i = 0; i < 7; ++i) frames.push_back(frame(100, 80, i));
    StoryboardOptions opts;
    opts.max_width = 300;
    const auto board = compose_storyboard(frames, {}, opts);
    EXPECT_EQ(board.image.width(), 300);
    EXPECT_EQ(board.image.height(), 240);
    EXPECT_EQ(board.tiles[3].x, 0);
    EXPECT_EQ(board.tiles[3].y, 80);
    EXPECT_EQ(board.tiles[6].y, 160);
}

TEST(Storyboard, WritesDeterministicPngAndSidecar) {
    testutil::TempDir tmp("board");
    testutil::write_frames(tmp / "frames", 6, 128, 64);
    for (const char* run : {"a", "b"}) {
        const auto board = compose_storyboard(sample_frames(tmp / "frames"));
        write_storyboard(board, 1.0, tmp.path() / run / "board.png", tmp.path() / run / "board.json");
    }
    EXPECT_EQ(testutil::slurp(tmp.path() / "a" / "board.png"), testutil::slurp(tmp.path() / "b" / "board.png"));
    EXPECT_EQ(testutil::slurp(tmp.path() / "a" / "board.json"), testutil::slurp(tmp.path() / "b" / "board.json"));
    const auto doc = nlohmann::json::parse(testutil::slurp(tmp.path() / "a" / "board.json"));
    EXPECT_EQ(doc["schema"], "procassess.storyboard");
    ASSERT_EQ(doc["tiles"].size(), 6u);
    int x = 0;
    for (const auto& t : doc["tiles"]) {
        EXPECT_EQ(t["x"].get<int>(), x);
        x += t["width"].get<int>();
    }
    EXPECT_DOUBLE_EQ(doc["tiles"][4]["timestamp"].get<double>(), 4.0);
}
