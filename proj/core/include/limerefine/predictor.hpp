#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "limerefine/image.hpp"

namespace limerefine {

struct Prediction {
    double p_no_tumor = 1.0;
    double p_tumor = 0.0;

    int decision() const noexcept { return p_tumor > p_no_tumor ? 1 : 0; }
    double prob(int cls) const noexcept { return cls == 1 ? p_tumor : p_no_tumor; }

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Builds a Prediction from a probability pair, validating range and that the
/// pair sums to one within 1e-6 (ProtocolViolation otherwise).
Prediction make_prediction(double p0, double p1);

enum class PredictorKind { BuiltinBlob, ExternalProcess, ExternalHttp };

struct PredictorHandle {
    PredictorKind kind = PredictorKind::BuiltinBlob;
    std::string endpoint;  // command line or URL for the external kinds
    std::size_t batch_limit = 64;
    std::chrono::milliseconds timeout{30000};

    /// "builtin", "exec:<command>" or "http:<url>".
    static PredictorHandle parse(const std::string& text, std::size_t batch_limit = 64);
};

/// Black-box binary classifier. predict_batch splits the input into
/// sub-batches of at most batch_limit images; results keep input order.
class Predictor {
public:
    explicit Predictor(std::size_t batch_limit);
    virtual ~Predictor() = default;

    Predictor(const Predictor&) = delete;
    Predictor& operator=(const Predictor&) = delete;

    std::vector<Prediction> predict_batch(std::span<const GrayImage> images);
    std::size_t batch_limit() const noexcept { return batch_limit_; }

protected:
    virtual std::vector<Prediction> predict_chunk(std::span<const GrayImage> images) = 0;

private:
    std::size_t batch_limit_;
};

inline constexpr float kBlobBrightThreshold = 0.8f;
inline constexpr double kBlobSaturationFraction = 0.05;

/// Synthetic stand-in: p_tumor = min(1, fraction of pixels >= 0.8 / 0.05).
Prediction builtin_blob_predict(const GrayImage& img);

class BuiltinBlobPredictor final : public Predictor {
public:
    explicit BuiltinBlobPredictor(std::size_t batch_limit = 64) : Predictor(batch_limit) {}

protected:
    std::vector<Prediction> predict_chunk(std::span<const GrayImage> images) override;
};

/// Creates the predictor described by `handle`. External predictors are
/// connected lazily on first use.
std::unique_ptr<Predictor> make_predictor(const PredictorHandle& handle);

}  // namespace limerefine
