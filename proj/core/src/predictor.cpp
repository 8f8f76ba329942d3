#include "limerefine/predictor.hpp"

#include <poll.h>
#include <signal.h>
#include <unistd.h>

#include <algorithm>
#include <boost/process.hpp>
#include <cmath>
#include <regex>
#include <string>

#include "httplib.h"
#include "limerefine/error.hpp"
#include "limerefine/wire.hpp"

namespace limerefine {

namespace bp = boost::process;

namespace {

constexpr int kMaxRetries = 2;
constexpr double kProbSumTolerance = 1e-6;

// Transport-level failure; retried, then surfaced as PredictorUnavailable.
struct TransportError {
    std::string what;
};

class ProcessPredictor final : public Predictor {
public:
    ProcessPredictor(std::string command, std::size_t batch_limit, std::chrono::milliseconds timeout)
        : Predictor(batch_limit), command_(std::move(command)), timeout_(timeout) {
        ::signal(SIGPIPE, SIG_IGN);
    }

    ~ProcessPredictor() override { stop(); }

protected:
    std::vector<Prediction> predict_chunk(std::span<const GrayImage> images) override {
        const std::string id = "req-" + std::to_string(next_id_++);
        const std::string line = wire::encode_request(id, images) + "\n";
        std::string last_error;
        for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
            try {
                ensure_started();
                write_all(line);
                return wire::decode_response(read_line(), id, images.size()).probs;
            } catch (const TransportError& e) {
                last_error = e.what;
                stop();
            } catch (const Error&) {
                stop();  // stream state is unknown after a bad reply
                throw;
            }
        }
        throw Error(ErrorCode::PredictorUnavailable,
                    "process `" + command_ + "` failed after " + std::to_string(kMaxRetries + 1) +
                        " attempts: " + last_error);
    }

private:
    void ensure_started() {
        if (child_ && child_->running()) return;
        stop();
        try {
            to_child_ = std::make_unique<bp::pipe>();
            from_child_ = std::make_unique<bp::pipe>();
            child_ = std::make_unique<bp::child>("/bin/sh", bp::args({"-c", command_}),
                                                 bp::std_in < *to_child_, bp::std_out > *from_child_);
            // Drop the parent's copies of the child's ends so EOF is observable.
            ::close(to_child_->native_source());
            to_child_->assign_source(-1);
            ::close(from_child_->native_sink());
            from_child_->assign_sink(-1);
        } catch (const std::exception& e) {
            throw TransportError{std::string("cannot launch: ") + e.what()};
        }
        buffer_.clear();
    }

    void stop() {
        if (to_child_) to_child_->close();
        if (child_) {
            std::error_code ec;
            if (child_->running(ec)) {
                child_->wait_for(std::chrono::milliseconds(200), ec);
                if (child_->running(ec)) child_->terminate(ec);
            }
            child_.reset();
        }
        to_child_.reset();
        from_child_.reset();
    }

    void write_all(const std::string& data) {
        std::size_t off = 0;
        while (off < data.size()) {
            const int n = to_child_->write(data.data() + off, static_cast<int>(data.size() - off));
            if (n <= 0) throw TransportError{"write to predictor failed"};
            off += static_cast<std::size_t>(n);
        }
    }

    std::string read_line() {
        const auto deadline = std::chrono::steady_clock::now() + timeout_;
        for (;;) {
            if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return line;
            }
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0) throw TransportError{"timed out waiting for predictor"};
            pollfd pfd{from_child_->native_source(), POLLIN, 0};
            const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
            if (ready < 0 && errno == EINTR) continue;
            if (ready <= 0) throw TransportError{"timed out waiting for predictor"};
            char chunk[65536];
            const int n = from_child_->read(chunk, sizeof(chunk));
            if (n <= 0) throw TransportError{"predictor closed its output"};
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    std::string command_;
    std::chrono::milliseconds timeout_;
    std::unique_ptr<bp::pipe> to_child_;
    std::unique_ptr<bp::pipe> from_child_;
    std::unique_ptr<bp::child> child_;
    std::string buffer_;
    std::uint64_t next_id_ = 0;
};

class HttpPredictor final : public Predictor {
public:
    HttpPredictor(const std::string& url, std::size_t batch_limit, std::chrono::milliseconds timeout)
        : Predictor(batch_limit), url_(url) {
        static const std::regex kUrl(R"(^(http://[^/]+)(/.*)?$)");
        std::smatch m;
        const std::string full = url.find("://") == std::string::npos ? "http://" + url : url;
        if (!std::regex_match(full, m, kUrl)) {
            throw Error(ErrorCode::InvalidArgument, "bad predictor URL: " + url);
        }
        base_ = m[1].str();
        path_ = m[2].matched && m[2].str() != "/" ? m[2].str() : "/predict";
        client_ = std::make_unique<httplib::Client>(base_);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout).count();
        client_->set_connection_timeout(static_cast<time_t>(std::max<long long>(1, secs)), 0);
        client_->set_read_timeout(static_cast<time_t>(std::max<long long>(1, secs)), 0);
    }

protected:
    std::vector<Prediction> predict_chunk(std::span<const GrayImage> images) override {
        const std::string id = "req-" + std::to_string(next_id_++);
        const std::string body = wire::encode_request(id, images);
        std::string last_error;
        for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
            auto res = client_->Post(path_, body, "application/json");
            if (!res) {
                last_error = httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                last_error = "HTTP status " + std::to_string(res->status);
                continue;
            }
            return wire::decode_response(res->body, id, images.size()).probs;
        }
        throw Error(ErrorCode::PredictorUnavailable,
                    "POST " + url_ + " failed after " + std::to_string(kMaxRetries + 1) +
                        " attempts: " + last_error);
    }

private:
    std::string url_;
    std::string base_;
    std::string path_;
    std::unique_ptr<httplib::Client> client_;
    std::uint64_t next_id_ = 0;
};

}  // namespace

Prediction make_prediction(double p0, double p1) {
    if (!std::isfinite(p0) || !std::isfinite(p1) || p0 < 0.0 || p0 > 1.0 || p1 < 0.0 || p1 > 1.0) {
        throw Error(ErrorCode::ProtocolViolation, "probability outside [0,1]");
    }
    if (std::abs(p0 + p1 - 1.0) > kProbSumTolerance) {
        throw Error(ErrorCode::ProtocolViolation, "probability pair does not sum to 1");
    }
    return Prediction{p0, p1};
}

PredictorHandle PredictorHandle::parse(const std::string& text, std::size_t batch_limit) {
    PredictorHandle h;
    h.batch_limit = batch_limit;
    if (text == "builtin" || text == "builtin-blob") {
        h.kind = PredictorKind::BuiltinBlob;
    } else if (text.rfind("exec:", 0) == 0 && text.size() > 5) {
        h.kind = PredictorKind::ExternalProcess;
        h.endpoint = text.substr(5);
    } else if (text.rfind("http:", 0) == 0 && text.size() > 5) {
        h.kind = PredictorKind::ExternalHttp;
        h.endpoint = text.substr(5);
        // Both "http:http://host/..." and "http://host/..." are accepted.
        if (h.endpoint.rfind("//", 0) == 0) h.endpoint = "http:" + h.endpoint;
    } else {
        throw Error(ErrorCode::InvalidArgument,
                    "predictor must be builtin, exec:CMD or http:URL (got \"" + text + "\")");
    }
    if (batch_limit < 1) throw Error(ErrorCode::InvalidArgument, "batch_limit must be >= 1");
    return h;
}

Predictor::Predictor(std::size_t batch_limit) : batch_limit_(batch_limit) {
    if (batch_limit_ < 1) throw Error(ErrorCode::InvalidArgument, "batch_limit must be >= 1");
}

std::vector<Prediction> Predictor::predict_batch(std::span<const GrayImage> images) {
    if (images.empty()) throw Error(ErrorCode::InvalidArgument, "empty prediction batch");
    const int w = images.front().width();
    const int h = images.front().height();
    for (const auto& img : images) {
        if (!img.same_shape(w, h)) throw Error(ErrorCode::ShapeMismatch, "batch images differ in size");
    }
    std::vector<Prediction> out;
    out.reserve(images.size());
    for (std::size_t start = 0; start < images.size(); start += batch_limit_) {
        const std::size_t count = std::min(batch_limit_, images.size() - start);
        auto chunk = predict_chunk(images.subspan(start, count));
        if (chunk.size() != count) {
            throw Error(ErrorCode::ProtocolViolation, "predictor returned a wrong number of results");
        }
        out.insert(out.end(), chunk.begin(), chunk.end());
    }
    return out;
}

Prediction builtin_blob_predict(const GrayImage& img) {
    std::size_t bright = 0;
    for (float v : img.pixels()) {
        if (v >= kBlobBrightThreshold) ++bright;
    }
    const double fraction = static_cast<double>(bright) / static_cast<double>(img.size());
    const double p = std::min(1.0, fraction / kBlobSaturationFraction);
    return Prediction{1.0 - p, p};
}

std::vector<Prediction> BuiltinBlobPredictor::predict_chunk(std::span<const GrayImage> images) {
    std::vector<Prediction> out;
    out.reserve(images.size());
    for (const auto& img : images) out.push_back(builtin_blob_predict(img));
    return out;
}

std::unique_ptr<Predictor> make_predictor(const PredictorHandle& handle) {
    switch (handle.kind) {
        case PredictorKind::BuiltinBlob:
            return std::make_unique<BuiltinBlobPredictor>(handle.batch_limit);
        case PredictorKind::ExternalProcess:
            return std::make_unique<ProcessPredictor>(handle.endpoint, handle.batch_limit,
                                                      handle.timeout);
        case PredictorKind::ExternalHttp:
            return std::make_unique<HttpPredictor>(handle.endpoint, handle.batch_limit,
                                                   handle.timeout);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown predictor kind");
}

}  // namespace limerefine
