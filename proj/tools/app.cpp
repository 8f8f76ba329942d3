#include "app.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "limerefine/annotations.hpp"
#include "limerefine/error.hpp"
#include "limerefine/heatmap.hpp"
#include "limerefine/image_io.hpp"
#include "limerefine/metrics.hpp"
#include "limerefine/overlay.hpp"
#include "limerefine/phantom.hpp"
#include "limerefine/predictor.hpp"

namespace limerefine::app {

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        items.push_back(item.substr(b, e - b + 1));
    }
    return items;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for " + path.string());
}

struct LoadedImage {
    GrayImage image;
    int source_width = 0;
    int source_height = 0;
};

LoadedImage load_for_explanation(const fs::path& path, int resize) {
    LoadedImage li;
    GrayImage raw = load_gray(path);
    li.source_width = raw.width();
    li.source_height = raw.height();
    li.image = resize > 0 ? resize_normalize(raw, resize) : std::move(raw);
    return li;
}

std::unique_ptr<Predictor> open_predictor(const RunConfig& cfg) {
    auto handle = PredictorHandle::parse(cfg.predictor, cfg.batch_limit);
    handle.timeout = std::chrono::milliseconds(cfg.predictor_timeout_ms);
    return make_predictor(handle);
}

ExplainerParams explainer_params(const RunConfig& cfg) {
    ExplainerParams p = cfg.explainer;
    p.seed = cfg.seed;
    return p;
}

QuickShiftParams segmentation_params(const RunConfig& cfg) {
    QuickShiftParams p = cfg.segmentation;
    p.seed = cfg.seed;
    return p;
}

std::string format_cell(const std::optional<double>& v) {
    if (!v) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

// Picks an output stem that no earlier image in this run has used.
std::string unique_stem(const fs::path& image, std::set<std::string>& used) {
    std::string base = image.stem().string();
    if (base.empty()) base = "image";
    std::string stem = base;
    for (int k = 2; used.count(stem); ++k) stem = base + "-" + std::to_string(k);
    used.insert(stem);
    return stem;
}

}  // namespace

void validate(const RunConfig& cfg) {
    if (cfg.top_n.empty()) throw Error(ErrorCode::InvalidArgument, "top-n list is empty");
    for (std::size_t i = 0; i < cfg.top_n.size(); ++i) {
        if (cfg.top_n[i] < 1) throw Error(ErrorCode::InvalidArgument, "top-n entries must be >= 1");
        if (i > 0 && cfg.top_n[i] <= cfg.top_n[i - 1]) {
            throw Error(ErrorCode::InvalidArgument, "top-n entries must be strictly increasing");
        }
    }
    if (cfg.explainer.num_samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
    if (!(cfg.explainer.kernel_width > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "kernel width must be positive");
    }
    if (!(cfg.explainer.ridge_lambda >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "ridge lambda must be >= 0");
    }
    if (!(cfg.refine.inside_fraction > 0.0 && cfg.refine.inside_fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "inside fraction must lie in (0, 1]");
    }
    if (cfg.resize < 0) throw Error(ErrorCode::InvalidArgument, "resize must be >= 0");
    if (cfg.batch_limit < 1) throw Error(ErrorCode::InvalidArgument, "batch limit must be >= 1");
    if (cfg.out.empty()) throw Error(ErrorCode::InvalidArgument, "output directory is required");
}

std::vector<std::size_t> parse_top_n(const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(text)) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || v < 1) {
            throw Error(ErrorCode::InvalidArgument, "bad top-n entry '" + item + "'");
        }
        if (!out.empty() && static_cast<std::size_t>(v) <= out.back()) {
            throw Error(ErrorCode::InvalidArgument, "top-n entries must be strictly increasing");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "top-n list is empty");
    return out;
}

std::vector<DetectorKind> parse_detectors(const std::string& text) {
    std::vector<DetectorKind> out;
    for (const auto& item : split_list(text)) out.push_back(parse_detector(item));
    if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no detectors given");
    return out;
}

std::vector<fs::path> read_manifest(const fs::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read manifest " + manifest.string());
    std::vector<fs::path> paths;
    std::string line;
    const fs::path base = manifest.parent_path();
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto e = line.find_last_not_of(" \t");
        fs::path p = line.substr(b, e - b + 1);
        paths.push_back(p.is_relative() ? base / p : p);
    }
    return paths;
}

int cmd_explain(const RunConfig& cfg) {
    validate(cfg);
    if (cfg.images.empty()) throw Error(ErrorCode::InvalidArgument, "no input images");
    fs::create_directories(cfg.out);
    auto predictor = open_predictor(cfg);
    const std::size_t overlay_n = cfg.top_n.back();

    std::set<std::string> used;
    int processed = 0;
    for (const auto& path : cfg.images) {
        const std::string stem = unique_stem(path, used);
        try {
            const auto li = load_for_explanation(path, cfg.resize);
            const auto seg = quickshift_segment(li.image, segmentation_params(cfg));
            const Heatmap hm = explain(li.image, seg, *predictor, explainer_params(cfg));
            write_text(cfg.out / (stem + ".heatmap.json"), heatmap_to_json(hm));
            write_png(cfg.out / (stem + ".overlay.png"), render_overlay(li.image, hm, seg, overlay_n));

            std::string summary = std::to_string(seg.num_segments()) + " segments, top " +
                                  std::to_string(overlay_n) + ":";
            for (int id : top_segments(hm, overlay_n)) summary += " " + std::to_string(id);

            if (cfg.refine_with) {
                EdgeDetector det = cfg.detector;
                det.kind = *cfg.refine_with;
                const auto bm = brain_mask(li.image, det);
                const auto rh = refine_heatmap(hm, seg, bm, cfg.refine);
                for (const auto& w : rh.warnings) spdlog::warn("{}: {}", path.string(), w);
                write_text(cfg.out / (stem + ".refined.json"), heatmap_to_json(rh));
                write_png(cfg.out / (stem + ".refined.overlay.png"),
                          render_overlay(li.image, rh.heatmap, seg, overlay_n, &bm));
                summary += "; refined:";
                for (int id : top_segments(rh.heatmap, overlay_n)) summary += " " + std::to_string(id);
            }
            spdlog::info("{}: {}", path.string(), summary);
            ++processed;
        } catch (const Error& e) {
            spdlog::error("{}: {}", path.string(), e.what());
            if (e.code() == ErrorCode::PredictorUnavailable) break;
        } catch (const std::exception& e) {
            spdlog::error("{}: {}", path.string(), e.what());
        }
    }
    return processed > 0 ? kExitOk : kExitAllFailed;
}

int cmd_evaluate(const RunConfig& cfg) {
    validate(cfg);
    if (cfg.detectors.empty()) throw Error(ErrorCode::InvalidArgument, "no detectors given");
    const auto images = read_manifest(cfg.manifest);
    AnnotationSet annotations;
    if (!cfg.annotations.empty()) annotations = load_via_annotations(cfg.annotations);
    fs::create_directories(cfg.out);
    auto predictor = open_predictor(cfg);

    struct Row {
        std::string image;
        DetectorKind detector;
        bool refined;
        std::size_t n;
        std::optional<double> tumor;
        std::optional<double> brain;
    };
    std::vector<Row> rows;
    int processed = 0;

    for (const auto& path : images) {
        const std::string name = path.filename().string();
        try {
            const auto li = load_for_explanation(path, cfg.resize);
            const int w = li.image.width(), h = li.image.height();

            std::optional<BinaryMask> tumor;
            if (auto it = annotations.find(name); it != annotations.end()) {
                try {
                    if (it->second.empty()) throw Error(ErrorCode::EmptyAnnotation, "no polygons");
                    BinaryMask m = tumor_mask(it->second, w, h, li.source_width, li.source_height);
                    if (m.area() == 0) throw Error(ErrorCode::EmptyAnnotation, "polygons cover no pixels");
                    tumor = std::move(m);
                } catch (const Error& e) {
                    spdlog::warn("{}: tumor coverage skipped ({})", name, e.what());
                }
            }

            const auto seg = quickshift_segment(li.image, segmentation_params(cfg));
            const Heatmap hm = explain(li.image, seg, *predictor, explainer_params(cfg));

            std::vector<Row> image_rows;
            for (DetectorKind kind : cfg.detectors) {
                EdgeDetector det = cfg.detector;
                det.kind = kind;
                const auto bm = brain_mask(li.image, det);
                const auto rh = refine_heatmap(hm, seg, bm, cfg.refine);
                for (const auto& wmsg : rh.warnings) spdlog::warn("{}: {}", name, wmsg);
                for (bool refined : {false, true}) {
                    const Heatmap& used = refined ? rh.heatmap : hm;
                    for (std::size_t n : cfg.top_n) {
                        const BinaryMask expl = explanation_pixels(used, seg, n);
                        Row r{name, kind, refined, n, std::nullopt, std::nullopt};
                        if (tumor) r.tumor = tumor_segment_coverage(expl, *tumor);
                        if (bm.mask.area() > 0) r.brain = brain_mask_segment_coverage(expl, bm.mask);
                        image_rows.push_back(std::move(r));
                    }
                }
            }
            rows.insert(rows.end(), image_rows.begin(), image_rows.end());
            ++processed;
            spdlog::info("{}: {} segments", name, seg.num_segments());
        } catch (const Error& e) {
            spdlog::error("{}: {}", name, e.what());
            if (e.code() == ErrorCode::PredictorUnavailable) break;
        } catch (const std::exception& e) {
            spdlog::error("{}: {}", name, e.what());
        }
    }

    std::string csv = "image,detector,refined,n,tumor_coverage,brain_coverage\n";
    for (const auto& r : rows) {
        csv += csv_field(r.image) + "," + std::string(to_string(r.detector)) + "," +
               (r.refined ? "1" : "0") + "," + std::to_string(r.n) + "," + format_cell(r.tumor) + "," +
               format_cell(r.brain) + "\n";
    }

    std::string comparison = "detector,n,u,p_two_sided,exact,raw_mean,refined_mean\n";
    for (DetectorKind kind : cfg.detectors) {
        for (std::size_t n : cfg.top_n) {
            std::vector<double> tumor_by[2], brain_by[2];
            for (const auto& r : rows) {
                if (r.detector != kind || r.n != n) continue;
                if (r.tumor) tumor_by[r.refined].push_back(*r.tumor);
                if (r.brain) brain_by[r.refined].push_back(*r.brain);
            }
            auto mean = [](const std::vector<double>& v) -> std::optional<double> {
                if (v.empty()) return std::nullopt;
                double s = 0.0;
                for (double x : v) s += x;
                return s / static_cast<double>(v.size());
            };
            for (int refined = 0; refined < 2; ++refined) {
                csv += std::string("mean,") + std::string(to_string(kind)) + "," + std::to_string(refined) +
                       "," + std::to_string(n) + "," + format_cell(mean(tumor_by[refined])) + "," +
                       format_cell(mean(brain_by[refined])) + "\n";
            }
            if (!tumor_by[0].empty() && !tumor_by[1].empty()) {
                const auto mw = mann_whitney_u(tumor_by[1], tumor_by[0]);
                comparison += std::string(to_string(kind)) + "," + std::to_string(n) + "," +
                              format_cell(mw.u) + "," + format_cell(mw.p_two_sided) + "," +
                              (mw.exact ? "1" : "0") + "," + format_cell(mean(tumor_by[0])) + "," +
                              format_cell(mean(tumor_by[1])) + "\n";
            }
        }
    }
    write_text(cfg.out / "coverage.csv", csv);
    write_text(cfg.out / "comparison.csv", comparison);
    spdlog::info("{} of {} images evaluated; wrote {}", processed, images.size(),
                 (cfg.out / "coverage.csv").string());
    return processed > 0 ? kExitOk : kExitAllFailed;
}

int cmd_phantom(const PhantomConfig& cfg) {
    if (cfg.count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
    fs::create_directories(cfg.out);
    AnnotationSet annotations;
    std::string manifest;
    for (int i = 0; i < cfg.count; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "phantom_%03d.png", i);
        const Phantom ph = make_phantom(cfg.size, cfg.seed * 1000003ULL + static_cast<std::uint64_t>(i));
        write_png(cfg.out / name, ph.image);
        annotations[name] = {ph.tumor_outline};
        manifest += std::string(name) + "\n";
    }
    write_text(cfg.out / "manifest.txt", manifest);
    write_text(cfg.out / "annotations.json", via_annotations_to_json(annotations));
    spdlog::info("wrote {} phantoms to {}", cfg.count, cfg.out.string());
    return kExitOk;
}

int run(int argc, char** argv) {
    CLI::App app{"Perturbation explanations of MRI tumor classifiers, refined by a brain mask.",
                 "limerefine"};
    app.set_config("--config", "", "key=value file mirroring the flags; flags win");
    app.require_subcommand(1);

    RunConfig cfg;
    PhantomConfig pcfg;
    std::string top_n = "1,3,5";
    std::string detectors = "canny,laplace,otsu";
    std::string refine;
    std::string fill = "black";
    bool verbose = false, quiet = false, no_fallback = false;

    app.add_flag("-v,--verbose", verbose, "Debug logging");
    app.add_flag("-q,--quiet", quiet, "Warnings and errors only");
    app.add_option("--predictor", cfg.predictor, "builtin | exec:CMD | http:URL")->capture_default_str();
    app.add_option("--batch-limit", cfg.batch_limit, "Images per predictor request")->capture_default_str();
    app.add_option("--timeout-ms", cfg.predictor_timeout_ms, "Predictor request timeout")->capture_default_str();
    app.add_option("--samples", cfg.explainer.num_samples, "Perturbation samples")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app.add_option("--top-n", top_n, "Comma-separated, strictly increasing")->capture_default_str();
    app.add_option("--out", cfg.out, "Output directory")->capture_default_str();
    app.add_option("--resize", cfg.resize, "Square side images are resized to (0 = keep)")->capture_default_str();
    app.add_option("--kernel-width", cfg.explainer.kernel_width, "Sample proximity kernel width")
        ->capture_default_str();
    app.add_option("--ridge-lambda", cfg.explainer.ridge_lambda, "Surrogate ridge penalty")->capture_default_str();
    app.add_option("--fill", fill, "Hidden segments: black | mean | <intensity>")->capture_default_str();
    app.add_option("--qs-kernel-size", cfg.segmentation.kernel_size)->capture_default_str();
    app.add_option("--qs-max-dist", cfg.segmentation.max_dist)->capture_default_str();
    app.add_option("--qs-ratio", cfg.segmentation.ratio)->capture_default_str();
    app.add_option("--sigma", cfg.detector.gaussian_sigma, "Pre-blur for edge detection")->capture_default_str();
    app.add_option("--canny-low", cfg.detector.canny_low)->capture_default_str();
    app.add_option("--canny-high", cfg.detector.canny_high)->capture_default_str();
    app.add_option("--laplace-threshold", cfg.detector.laplace_threshold)->capture_default_str();
    app.add_option("--inside-fraction", cfg.refine.inside_fraction, "Retention rule")->capture_default_str();
    app.add_flag("--no-fallback", no_fallback, "Refine even with a degenerate brain mask");

    auto* explain_cmd = app.add_subcommand("explain", "Heatmaps and overlays for individual images");
    explain_cmd->fallthrough();
    explain_cmd->add_option("--image", cfg.images, "Input image(s)")->required();
    explain_cmd->add_option("--refine", refine, "Refine with canny | laplace | otsu");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Coverage sweep over a manifest of images");
    evaluate_cmd->fallthrough();
    evaluate_cmd->add_option("--manifest", cfg.manifest, "One image path per line")->required();
    evaluate_cmd->add_option("--annotations", cfg.annotations, "VIA polygon JSON");
    evaluate_cmd->add_option("--detectors", detectors, "Comma-separated detector list")->capture_default_str();

    auto* phantom_cmd = app.add_subcommand("phantom", "Generate synthetic slices with ground truth");
    phantom_cmd->fallthrough();
    phantom_cmd->add_option("--count", pcfg.count)->capture_default_str();
    phantom_cmd->add_option("--size", pcfg.size)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    auto logger = spdlog::get("limerefine");
    if (!logger) logger = spdlog::stderr_color_mt("limerefine");
    logger->set_pattern("[%l] %v");
    logger->set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::warn : spdlog::level::info);
    spdlog::set_default_logger(logger);

    try {
        cfg.top_n = parse_top_n(top_n);
        cfg.refine.fallback_on_degenerate = !no_fallback;
        if (fill == "black") {
            cfg.explainer.fill = FillMode::constant(0.0f);
        } else if (fill == "mean") {
            cfg.explainer.fill = FillMode::segment_mean();
        } else {
            std::size_t used = 0;
            float v = -1.0f;
            try {
                v = std::stof(fill, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != fill.size() || !(v >= 0.0f && v <= 1.0f)) {
                throw Error(ErrorCode::InvalidArgument, "fill must be black, mean or a value in [0, 1]");
            }
            cfg.explainer.fill = FillMode::constant(v);
        }

        if (*explain_cmd) {
            if (!refine.empty()) cfg.refine_with = parse_detector(refine);
            return cmd_explain(cfg);
        }
        if (*evaluate_cmd) {
            cfg.detectors = parse_detectors(detectors);
            return cmd_evaluate(cfg);
        }
        pcfg.seed = cfg.seed;
        pcfg.out = cfg.out;
        return cmd_phantom(pcfg);
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return e.code() == ErrorCode::InvalidArgument ? kExitConfig : kExitAllFailed;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitAllFailed;
    }
}

}  // namespace limerefine::app
