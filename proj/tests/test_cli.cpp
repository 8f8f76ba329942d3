#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>

#include "app.hpp"
#include "support.hpp"

using namespace limerefine;
namespace fs = std::filesystem;

namespace {

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "limerefine");
    args.push_back("-q");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return app::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::size_t count_prefix(const std::vector<std::string>& rows, const std::string& prefix) {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [&](const std::string& r) { return r.rfind(prefix, 0) == 0; }));
}

// Small phantom set shared by the slower tests.
class CliPhantoms : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new lrtest::TempDir;
        ASSERT_EQ(run_cli({"phantom", "--count", "10", "--size", "96", "--seed", "2", "--out", (dir_->path() / "ph").string()}), 0);
    }
    static void TearDownTestSuite() {
        delete dir_;
        dir_ = nullptr;
    }
    static fs::path phantoms() { return dir_->path() / "ph"; }
    static fs::path scratch(const std::string& name) { return dir_->path() / name; }

    static lrtest::TempDir* dir_;
};

lrtest::TempDir* CliPhantoms::dir_ = nullptr;

}  // namespace

TEST(CliParse, TopN) {
    EXPECT_EQ(app::parse_top_n("1,3,5"), (std::vector<std::size_t>{1, 3, 5}));
    EXPECT_EQ(app::parse_top_n("2"), (std::vector<std::size_t>{2}));
    for (const char* bad : {"", "0", "3,1", "1,1", "a", "1,x", "-1"})
        EXPECT_THROW_CODE(ErrorCode::InvalidArgument, app::parse_top_n(bad));
    EXPECT_EQ(app::parse_detectors("otsu,canny"), (std::vector<DetectorKind>{DetectorKind::Otsu, DetectorKind::Canny}));
    EXPECT_THROW_CODE(ErrorCode::InvalidArgument, app::parse_detectors("sobel"));
}

TEST(CliParse, Validate) {
    app::RunConfig cfg;
    EXPECT_NO_THROW(app::validate(cfg));
    cfg.refine.inside_fraction = 0.0;
    EXPECT_THROW_CODE(ErrorCode::InvalidArgument, app::validate(cfg));
    cfg = {};
    cfg.explainer.num_samples = 0;
    EXPECT_THROW_CODE(ErrorCode::InvalidArgument, app::validate(cfg));
}

TEST(CliParse, ManifestResolvesRelativePaths) {
    lrtest::TempDir dir;
    fs::create_directories(dir.path() / "sub");
    std::ofstream(dir.path() / "sub" / "list.txt") << "# scans\na.png\n\n/abs/b.png\n";
    const auto paths = app::read_manifest(dir.path() / "sub" / "list.txt");
    ASSERT_EQ(paths.size(), 2u);
    EXPECT_EQ(paths[0], dir.path() / "sub" / "a.png");
    EXPECT_EQ(paths[1], fs::path("/abs/b.png"));
}

TEST_F(CliPhantoms, PhantomArtifacts) {
    const auto manifest = lines(slurp(phantoms() / "manifest.txt"));
    ASSERT_EQ(manifest.size(), 10u);
    EXPECT_TRUE(fs::exists(phantoms() / "phantom_000.png"));
    EXPECT_TRUE(fs::exists(phantoms() / "phantom_009.png"));
    EXPECT_TRUE(fs::exists(phantoms() / "annotations.json"));
}

TEST_F(CliPhantoms, ExplainWritesArtifactsDeterministically) {
    const std::string img = (phantoms() / "phantom_000.png").string();
    const fs::path a = scratch("explain-a"), b = scratch("explain-b");
    for (const auto& out : {a, b})
        ASSERT_EQ(run_cli({"explain", "--image", img, "--refine", "otsu", "--samples", "200", "--out", out.string()}), 0);
    std::size_t json = 0, png = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        json += e.path().extension() == ".json";
        png += e.path().extension() == ".png";
        EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path();
    }
    EXPECT_EQ(json, 2u);
    EXPECT_EQ(png, 2u);
    EXPECT_TRUE(fs::exists(a / "phantom_000.heatmap.json"));
    EXPECT_TRUE(fs::exists(a / "phantom_000.refined.json"));
}

TEST_F(CliPhantoms, ExplainFailures) {
    const std::string img = (phantoms() / "phantom_001.png").string();
    EXPECT_NE(run_cli({"explain", "--image", img, "--predictor", "http:http://127.0.0.1:1/predict", "--timeout-ms",
                       "300", "--out", scratch("unreachable").string()}),
              0);
    EXPECT_EQ(run_cli({"explain", "--image", scratch("missing.png").string(), "--out", scratch("missing").string()}), 1);
    EXPECT_EQ(run_cli({"explain", "--image", img, "--top-n", "3,1", "--out", scratch("badn").string()}), 2);
    EXPECT_EQ(run_cli({"explain", "--image", img, "--fill", "2.5", "--out", scratch("badfill").string()}), 2);
    EXPECT_NE(run_cli({"explain"}), 0);
}

TEST_F(CliPhantoms, EvaluateRowsAndDeterminism) {
    const std::vector<std::string> common{"--manifest", (phantoms() / "manifest.txt").string(), "--annotations",
                                          (phantoms() / "annotations.json").string(), "--resize", "96", "--samples",
                                          "150"};
    auto args = [&](const fs::path& out) {
        std::vector<std::string> v{"evaluate"};
        v.insert(v.end(), common.begin(), common.end());
        v.push_back("--out");
        v.push_back(out.string());
        return v;
    };
    ASSERT_EQ(run_cli(args(scratch("eval-a"))), 0);
    ASSERT_EQ(run_cli(args(scratch("eval-b"))), 0);
    const std::string csv = slurp(scratch("eval-a") / "coverage.csv");
    EXPECT_EQ(csv, slurp(scratch("eval-b") / "coverage.csv"));
    EXPECT_EQ(slurp(scratch("eval-a") / "comparison.csv"), slurp(scratch("eval-b") / "comparison.csv"));

    const auto rows = lines(csv);
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows[0], "image,detector,refined,n,tumor_coverage,brain_coverage");
    EXPECT_EQ(count_prefix(rows, "phantom_"), 10u * 3 * 3 * 2);
    EXPECT_EQ(count_prefix(rows, "mean,"), 3u * 3 * 2);
    for (const auto& r : rows)
        if (r.rfind("phantom_", 0) == 0) EXPECT_EQ(std::count(r.begin(), r.end(), ','), 5) << r;
    EXPECT_EQ(lines(slurp(scratch("eval-a") / "comparison.csv")).size(), 1u + 3 * 3);
}

TEST_F(CliPhantoms, ConfigFileOverridesDefaults) {
    const fs::path cfg = scratch("run.ini");
    std::ofstream(cfg) << "top-n = \"2\"\nsamples = 100\n";
    ASSERT_EQ(run_cli({"--config", cfg.string(), "evaluate", "--manifest", (phantoms() / "manifest.txt").string(),
                       "--detectors", "otsu", "--resize", "96", "--out", scratch("eval-cfg").string()}),
              0);
    const auto rows = lines(slurp(scratch("eval-cfg") / "coverage.csv"));
    EXPECT_EQ(count_prefix(rows, "phantom_"), 10u * 1 * 1 * 2);
    EXPECT_EQ(count_prefix(rows, "mean,otsu,0,2,"), 1u);
}
