#include <benchmark/benchmark.h>

#include "limerefine/explainer.hpp"
#include "limerefine/maskgen.hpp"
#include "limerefine/phantom.hpp"
#include "limerefine/segmentation.hpp"

using namespace limerefine;

namespace {

const Phantom& phantom() {
    static const Phantom ph = make_phantom(224, 3);
    return ph;
}

void BM_QuickShift(benchmark::State& state) {
    const GrayImage img = resize_normalize(phantom().image, static_cast<int>(state.range(0)));
    QuickShiftParams p;
    for (auto _ : state) benchmark::DoNotOptimize(quickshift_segment(img, p));
}
BENCHMARK(BM_QuickShift)->Arg(64)->Arg(128)->Arg(224)->Unit(benchmark::kMillisecond);

void BM_Explain(benchmark::State& state) {
    const GrayImage& img = phantom().image;
    const SegmentMap seg = quickshift_segment(img, {});
    BuiltinBlobPredictor predictor;
    ExplainerParams p;
    p.num_samples = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(explain(img, seg, predictor, p));
    state.counters["segments"] = seg.num_segments();
}
BENCHMARK(BM_Explain)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Canny(benchmark::State& state) {
    const auto det = EdgeDetector::with_kind(DetectorKind::Canny);
    for (auto _ : state) benchmark::DoNotOptimize(canny_edges(phantom().image, det));
}
BENCHMARK(BM_Canny)->Unit(benchmark::kMicrosecond);

void BM_Otsu(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(otsu_threshold(phantom().image));
}
BENCHMARK(BM_Otsu)->Unit(benchmark::kMicrosecond);

void BM_BrainMask(benchmark::State& state) {
    const auto det = EdgeDetector::with_kind(static_cast<DetectorKind>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(brain_mask(phantom().image, det));
}
BENCHMARK(BM_BrainMask)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
