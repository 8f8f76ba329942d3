#include <cmath>

#include "json.hpp"
#include "limerefine/error.hpp"
#include "limerefine/heatmap.hpp"

namespace limerefine {

namespace {

using ojson = nlohmann::ordered_json;

ojson to_ordered(const Heatmap& hm) {
    ojson j;
    j["intercept"] = hm.intercept;
    ojson imp = ojson::object();
    for (std::size_t i = 0; i < hm.importances.size(); ++i) {
        imp[std::to_string(i)] = hm.importances[i];
    }
    j["importances"] = std::move(imp);
    j["num_segments"] = hm.num_segments();
    j["seed"] = hm.seed;
    return j;
}

}  // namespace

std::string heatmap_to_json(const Heatmap& hm) {
    return to_ordered(hm).dump(2) + "\n";
}

std::string heatmap_to_json(const RefinedHeatmap& rh) {
    ojson j = to_ordered(rh.heatmap);
    j["refined"] = true;
    j["detector"] = std::string(to_string(rh.detector));
    j["warnings"] = rh.warnings;
    return j.dump(2) + "\n";
}

Heatmap heatmap_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("heatmap JSON: ") + e.what());
    }
    try {
        Heatmap hm;
        hm.intercept = j.at("intercept").get<double>();
        hm.seed = j.at("seed").get<std::uint64_t>();
        const int d = j.at("num_segments").get<int>();
        if (d < 0) throw Error(ErrorCode::InvalidArgument, "negative num_segments");
        hm.importances.assign(static_cast<std::size_t>(d), 0.0);
        const auto& imp = j.at("importances");
        if (imp.size() != static_cast<std::size_t>(d)) {
            throw Error(ErrorCode::InvalidArgument, "importances do not cover every segment");
        }
        for (int s = 0; s < d; ++s) {
            const double v = imp.at(std::to_string(s)).get<double>();
            if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite importance");
            hm.importances[static_cast<std::size_t>(s)] = v;
        }
        return hm;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("heatmap JSON: ") + e.what());
    }
}

}  // namespace limerefine
