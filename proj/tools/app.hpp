#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "limerefine/explainer.hpp"
#include "limerefine/maskgen.hpp"
#include "limerefine/refine.hpp"
#include "limerefine/segmentation.hpp"

namespace limerefine::app {

namespace fs = std::filesystem;

enum ExitCode : int {
    kExitOk = 0,
    kExitAllFailed = 1,
    kExitConfig = 2,
};

struct RunConfig {
    std::vector<fs::path> images;  // explain
    fs::path manifest;             // evaluate
    fs::path annotations;          // evaluate
    std::string predictor = "builtin";
    std::size_t batch_limit = 64;
    int predictor_timeout_ms = 30000;
    int resize = 224;  // 0 keeps the input size

    QuickShiftParams segmentation;
    ExplainerParams explainer;
    EdgeDetector detector;
    RefineParams refine;

    std::optional<DetectorKind> refine_with;  // explain
    std::vector<DetectorKind> detectors{DetectorKind::Canny, DetectorKind::Laplace,
                                        DetectorKind::Otsu};  // evaluate
    std::vector<std::size_t> top_n{1, 3, 5};
    fs::path out = "out";
    std::uint64_t seed = 0;
};

struct PhantomConfig {
    int count = 10;
    int size = 224;
    std::uint64_t seed = 0;
    fs::path out = "phantoms";
};

/// Throws Error(InvalidArgument) on values the commands cannot run with.
void validate(const RunConfig& cfg);

/// Writes <stem>.heatmap.json and <stem>.overlay.png per image, plus
/// <stem>.refined.json and <stem>.refined.overlay.png when refine_with is set.
int cmd_explain(const RunConfig& cfg);

/// Writes coverage.csv (one row per image, detector, refined, n, then mean
/// rows) and comparison.csv (Mann-Whitney raw vs refined per detector and n).
int cmd_evaluate(const RunConfig& cfg);

/// Writes phantom_NNN.png, manifest.txt and annotations.json.
int cmd_phantom(const PhantomConfig& cfg);

/// Manifest: one image path per line, relative paths resolved against the
/// manifest's directory; blank lines and '#' comments skipped.
std::vector<fs::path> read_manifest(const fs::path& manifest);

/// "1,3,5" -> {1, 3, 5}.
std::vector<std::size_t> parse_top_n(const std::string& text);
std::vector<DetectorKind> parse_detectors(const std::string& text);

/// Entry point shared by the executable and the tests.
int run(int argc, char** argv);

}  // namespace limerefine::app
