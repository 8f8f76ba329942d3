#include <algorithm>
#include <fstream>
#include <queue>
#include <set>

#include <gtest/gtest.h>

#include "limerefine/image.hpp"
#include "limerefine/image_io.hpp"
#include "limerefine/mask_ops.hpp"
#include "support.hpp"

using namespace limerefine;
using lrtest::Rng;

namespace {

// Exact even-odd test on doubled integer coordinates. Vertices are integers,
// so the pixel centre (x + 0.5, y + 0.5) becomes the odd point (2x + 1, 2y + 1).
bool oracle_inside(const std::vector<std::pair<long, long>>& v, long px, long py) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        auto [ax, ay] = v[i];
        auto [bx, by] = v[(i + 1) % n];
        ax *= 2, ay *= 2, bx *= 2, by *= 2;
        const long cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
        if (cross == 0 && std::min(ax, bx) <= px && px <= std::max(ax, bx) && std::min(ay, by) <= py &&
            py <= std::max(ay, by)) {
            return true;  // on an edge
        }
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const long xi = 2 * v[i].first, yi = 2 * v[i].second;
        const long xj = 2 * v[j].first, yj = 2 * v[j].second;
        if ((yi > py) != (yj > py)) {
            // px < xi + (py - yi) (xj - xi) / (yj - yi), multiplied through by (yj - yi)
            const long lhs = (px - xi) * (yj - yi);
            const long rhs = (py - yi) * (xj - xi);
            if ((yj - yi) > 0 ? lhs < rhs : lhs > rhs) inside = !inside;
        }
    }
    return inside;
}

// Half-plane test for a convex polygon; independent of the crossing rule.
bool convex_contains(const std::vector<std::pair<long, long>>& hull, long px, long py) {
    int sign = 0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        auto [ax, ay] = hull[i];
        auto [bx, by] = hull[(i + 1) % hull.size()];
        const long c = (2 * bx - 2 * ax) * (py - 2 * ay) - (2 * by - 2 * ay) * (px - 2 * ax);
        if (c == 0) continue;
        const int s = c > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        else if (s != sign) return false;
    }
    return true;
}

std::vector<std::pair<long, long>> convex_hull(std::vector<std::pair<long, long>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    auto cross = [](auto o, auto a, auto b) {
        return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<long, long>> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
        h[k++] = pts[i - 1];
    }
    h.resize(k - 1);
    return h;
}

Polygon to_polygon(const std::vector<std::pair<long, long>>& v) {
    Polygon p;
    for (auto [x, y] : v) p.vertices.push_back({static_cast<double>(x), static_cast<double>(y)});
    return p;
}

// Union-find labelling, used as a second opinion on connected_components.
std::vector<BinaryMask> oracle_components(const BinaryMask& m, bool eight) {
    const int w = m.width(), h = m.height();
    std::vector<int> parent(m.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    auto find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!m.at(x, y)) continue;
            const int p = y * w + x;
            if (x > 0 && m.at(x - 1, y)) unite(p, p - 1);
            if (y > 0 && m.at(x, y - 1)) unite(p, p - w);
            if (eight && y > 0 && x > 0 && m.at(x - 1, y - 1)) unite(p, p - w - 1);
            if (eight && y > 0 && x + 1 < w && m.at(x + 1, y - 1)) unite(p, p - w + 1);
        }
    std::vector<std::pair<int, BinaryMask>> by_root;
    std::vector<int> slot(m.size(), -1);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m[i]) continue;
        const int r = find(static_cast<int>(i));
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(by_root.size());
            by_root.push_back({static_cast<int>(i), BinaryMask(w, h)});
        }
        by_root[slot[r]].second.set(i);
    }
    std::stable_sort(by_root.begin(), by_root.end(), [](const auto& a, const auto& b) {
        if (a.second.area() != b.second.area()) return a.second.area() > b.second.area();
        return a.first < b.first;
    });
    std::vector<BinaryMask> out;
    for (auto& [first, mask] : by_root) out.push_back(std::move(mask));
    return out;
}

// Exterior by repeated relaxation until nothing changes.
BinaryMask oracle_fill(const BinaryMask& m) {
    const int w = m.width(), h = m.height();
    BinaryMask outside(w, h);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (m.at(x, y) || outside.at(x, y)) continue;
                const bool border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
                const bool near = (x > 0 && outside.at(x - 1, y)) || (x + 1 < w && outside.at(x + 1, y)) ||
                                  (y > 0 && outside.at(x, y - 1)) || (y + 1 < h && outside.at(x, y + 1));
                if (border || near) {
                    outside.set(x, y);
                    changed = true;
                }
            }
    }
    return ~outside;
}

}  // namespace

TEST(GrayImage, RejectsOutOfRangeAndBadShape) {
    EXPECT_THROW_CODE(ErrorCode::InvalidArgument, GrayImage(2, 2, std::vector<float>{0, 0.5f, 1.0f, 1.5f}));
    EXPECT_THROW_CODE(ErrorCode::InvalidArgument, GrayImage(2, 2, std::vector<float>{0, 0, 0}));
    EXPECT_THROW_CODE(ErrorCode::ZeroDimension, GrayImage(0, 3));
    EXPECT_THROW_CODE(ErrorCode::InvalidArgument, GrayImage(2, 2, -0.1f));
    GrayImage ok(3, 2, 0.25f);
    EXPECT_EQ(ok.size(), 6u);
    EXPECT_FLOAT_EQ(ok.at(2, 1), 0.25f);
}

TEST(BinaryMask, SetAlgebra) {
    BinaryMask a(4, 1, std::vector<std::uint8_t>{1, 1, 0, 0});
    BinaryMask b(4, 1, std::vector<std::uint8_t>{0, 1, 1, 0});
    EXPECT_EQ((a & b).area(), 1u);
    EXPECT_EQ((a | b).area(), 3u);
    EXPECT_EQ((~a).area(), 2u);
    EXPECT_TRUE((a & b).subset_of(a));
    EXPECT_FALSE(a.subset_of(b));
    EXPECT_THROW_CODE(ErrorCode::ShapeMismatch, a & BinaryMask(2, 2));
}

TEST(LoadGray, EndpointsOfByteScale) {
    lrtest::TempDir dir;
    const auto path = dir.path() / "checker.png";
    write_png(path, GrayImage(2, 2, std::vector<float>{0.0f, 1.0f, 0.0f, 1.0f}));
    const GrayImage img = load_gray(path);
    ASSERT_EQ(img.width(), 2);
    ASSERT_EQ(img.height(), 2);
    EXPECT_EQ(img[0], 0.0f);
    EXPECT_EQ(img[1], 1.0f);
    EXPECT_EQ(img[2], 0.0f);
    EXPECT_EQ(img[3], 1.0f);
}

TEST(LoadGray, ColourUsesChannelMean) {
    lrtest::TempDir dir;
    RgbImage rgb(1, 1);
    rgb.pixel(0, 0)[0] = 30;
    rgb.pixel(0, 0)[1] = 60;
    rgb.pixel(0, 0)[2] = 90;
    write_png(dir.path() / "c.png", rgb);
    const GrayImage img = load_gray(dir.path() / "c.png");
    EXPECT_NEAR(img[0], 180.0 / 765.0, 1e-6);
    EXPECT_NEAR(img[0], 0.2353, 1e-4);
}

TEST(LoadGray, Errors) {
    EXPECT_THROW_CODE(ErrorCode::UnreadableImage, load_gray("/nonexistent/definitely/missing.png"));
    lrtest::TempDir dir;
    std::ofstream(dir.path() / "junk.png") << "not an image at all";
    EXPECT_THROW_CODE(ErrorCode::UnreadableImage, load_gray(dir.path() / "junk.png"));
    const std::vector<std::uint8_t> empty;
    EXPECT_THROW_CODE(ErrorCode::UnreadableImage, decode_gray(empty));
}

TEST(ImageIo, PngRoundTripIsExactOnByteGrid) {
    Rng rng(7);
    GrayImage img(13, 9);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<float>(rng.integer(0, 255)) / 255.0f;
    const auto bytes = encode_png(img);
    const GrayImage back = decode_gray(bytes);
    ASSERT_TRUE(back.same_shape(13, 9));
    for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(back[i], img[i], 1e-7);
}

TEST(ImageIo, Base64KnownVectors) {
    const std::pair<std::string, std::string> cases[] = {
        {"", ""}, {"f", "Zg=="}, {"fo", "Zm8="}, {"foo", "Zm9v"}, {"foob", "Zm9vYg=="}, {"foobar", "Zm9vYmFy"}};
    for (const auto& [plain, enc] : cases) {
        const std::vector<std::uint8_t> bytes(plain.begin(), plain.end());
        EXPECT_EQ(base64_encode(bytes), enc);
        EXPECT_EQ(base64_decode(enc), bytes);
    }
    EXPECT_THROW_CODE(ErrorCode::ProtocolViolation, base64_decode("abc"));
}

TEST(Resize, HalvesLargeInput) {
    const GrayImage out = resize_normalize(GrayImage(448, 448, 0.3f));
    EXPECT_EQ(out.width(), 224);
    EXPECT_EQ(out.height(), 224);
}

TEST(Resize, ConstantImageUnchanged) {
    const GrayImage img(224, 224, 0.5f);
    EXPECT_EQ(resize_normalize(img, 224), img);
}

TEST(Resize, BilinearRampValues) {
    // Centres of the 4-wide output map to input x = -0.25, 0.25, 0.75, 1.25.
    const GrayImage img(2, 1, std::vector<float>{0.0f, 1.0f});
    const GrayImage out = resize_normalize(img, 4);
    ASSERT_EQ(out.width(), 4);
    const float expected[] = {0.0f, 0.25f, 0.75f, 1.0f};
    for (int x = 0; x < 4; ++x) EXPECT_NEAR(out.at(x, 0), expected[x], 1e-6) << x;
    for (int x = 1; x < 4; ++x) EXPECT_GE(out.at(x, 0), out.at(x - 1, 0));
    EXPECT_THROW_CODE(ErrorCode::ZeroDimension, resize_normalize(img, 0));
}

TEST(Resize, StaysInRangeProperty) {
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        const GrayImage img = lrtest::random_image(rng.integer(1, 40), rng.integer(1, 40), rng);
        const GrayImage out = resize_normalize(img, rng.integer(1, 64));
        for (float v : out.pixels()) {
            EXPECT_GE(v, 0.0f);
            EXPECT_LE(v, 1.0f);
        }
    }
}

TEST(Rasterize, AxisAlignedSquare) {
    Polygon sq{{{0, 0}, {8, 0}, {8, 8}, {0, 8}}};
    const BinaryMask m = rasterize_polygon(sq, 16, 16);
    EXPECT_EQ(m.area(), 64u);
    EXPECT_TRUE(m.at(7, 7));
    EXPECT_FALSE(m.at(8, 0));
}

TEST(Rasterize, DegenerateAndFullFrame) {
    EXPECT_THROW_CODE(ErrorCode::DegeneratePolygon, rasterize_polygon(Polygon{{{3, 3}, {3, 3}, {3, 3}}}, 8, 8));
    EXPECT_THROW_CODE(ErrorCode::DegeneratePolygon, rasterize_polygon(Polygon{{{0, 0}, {1, 1}}}, 8, 8));
    const BinaryMask all = rasterize_polygon(Polygon{{{-1, -1}, {20, -1}, {20, 20}, {-1, 20}}}, 12, 10);
    EXPECT_EQ(all.area(), 120u);
}

TEST(Rasterize, RandomConvexMatchesHalfPlaneOracle) {
    Rng rng(2024);
    int checked = 0;
    for (int t = 0; t < 300; ++t) {
        const int w = rng.integer(1, 32), h = rng.integer(1, 32);
        std::vector<std::pair<long, long>> pts;
        const int k = rng.integer(3, 9);
        for (int i = 0; i < k; ++i) pts.push_back({rng.integer(-3, w + 3), rng.integer(-3, h + 3)});
        const auto hull = convex_hull(pts);
        if (hull.size() < 3) continue;
        ++checked;
        const BinaryMask m = rasterize_polygon(to_polygon(hull), w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                ASSERT_EQ(m.at(x, y), convex_contains(hull, 2 * x + 1, 2 * y + 1))
                    << "trial " << t << " pixel " << x << "," << y;
            }
    }
    EXPECT_GT(checked, 250);
}

TEST(Rasterize, RandomSimpleAndSelfIntersectingMatchEvenOdd) {
    Rng rng(99);
    for (int t = 0; t < 200; ++t) {
        const int w = rng.integer(4, 32), h = rng.integer(4, 32);
        std::vector<std::pair<long, long>> v;
        const int k = rng.integer(3, 10);
        for (int i = 0; i < k; ++i) v.push_back({rng.integer(0, w), rng.integer(0, h)});
        std::set<std::pair<long, long>> distinct(v.begin(), v.end());
        if (distinct.size() < 3) continue;
        const BinaryMask m = rasterize_polygon(to_polygon(v), w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                ASSERT_EQ(m.at(x, y), oracle_inside(v, 2 * x + 1, 2 * y + 1))
                    << "trial " << t << " pixel " << x << "," << y;
            }
    }
}

TEST(Components, SmallCases) {
    BinaryMask two(5, 5);
    two.set(0, 0);
    two.set(3, 3);
    auto c4 = connected_components(two, Connectivity::Four);
    ASSERT_EQ(c4.size(), 2u);
    EXPECT_EQ(c4[0].area(), 1u);
    EXPECT_TRUE(c4[0].at(0, 0));  // equal areas: earlier first pixel first

    EXPECT_TRUE(connected_components(BinaryMask(4, 4), Connectivity::Eight).empty());

    BinaryMask diag(2, 2);
    diag.set(0, 0);
    diag.set(1, 1);
    EXPECT_EQ(connected_components(diag, Connectivity::Four).size(), 2u);
    EXPECT_EQ(connected_components(diag, Connectivity::Eight).size(), 1u);
}

TEST(Components, MatchUnionFindOracle) {
    Rng rng(5);
    for (int t = 0; t < 150; ++t) {
        const BinaryMask m = lrtest::random_mask(rng.integer(1, 30), rng.integer(1, 30), rng.uniform(0.2, 0.7), rng);
        for (bool eight : {false, true}) {
            const auto got = connected_components(m, eight ? Connectivity::Eight : Connectivity::Four);
            const auto want = oracle_components(m, eight);
            ASSERT_EQ(got.size(), want.size());
            std::size_t total = 0;
            for (std::size_t i = 0; i < got.size(); ++i) {
                EXPECT_EQ(got[i], want[i]) << "trial " << t << " component " << i;
                total += got[i].area();
            }
            EXPECT_EQ(total, m.area());
        }
    }
}

TEST(FillHoles, HollowSquare) {
    BinaryMask m(9, 9);
    for (int i = 2; i <= 6; ++i) {
        m.set(i, 2);
        m.set(i, 6);
        m.set(2, i);
        m.set(6, i);
    }
    const BinaryMask f = fill_holes(m);
    EXPECT_EQ(f.area(), 25u);
    EXPECT_TRUE(f.at(4, 4));
    EXPECT_EQ(fill_holes(f), f);
    EXPECT_EQ(fill_holes(BinaryMask(6, 6)).area(), 0u);
}

TEST(FillHoles, MatchesRelaxationOracleAndIsIdempotent) {
    Rng rng(17);
    for (int t = 0; t < 150; ++t) {
        const BinaryMask m = lrtest::random_mask(rng.integer(1, 28), rng.integer(1, 28), rng.uniform(0.3, 0.8), rng);
        const BinaryMask f = fill_holes(m);
        EXPECT_EQ(f, oracle_fill(m)) << "trial " << t;
        EXPECT_TRUE(m.subset_of(f));
        EXPECT_EQ(fill_holes(f), f);
    }
}

TEST(InnerBoundary, RingOfSolidSquare) {
    BinaryMask m(7, 7);
    for (int y = 1; y <= 5; ++y)
        for (int x = 1; x <= 5; ++x) m.set(x, y);
    const BinaryMask b = inner_boundary(m);
    EXPECT_EQ(b.area(), 16u);
    EXPECT_FALSE(b.at(3, 3));
    EXPECT_TRUE(b.subset_of(m));
}
