#pragma once

#include <string>

#include "json.hpp"
#include "reaper/baselines.hpp"
#include "reaper/episode.hpp"
#include "reaper/segmentation.hpp"

namespace reaper {

using Json = nlohmann::json;

// Readers apply the keys present in `j` on top of `base`. Unknown keys and
// wrong types throw Error(ConfigInvalid) naming the offending path.
SegParams seg_params_from_json(const Json& j, SegParams base = {});
Json to_json(const SegParams& p);

GlcmSegParams glcm_params_from_json(const Json& j, GlcmSegParams base = {});

// "fixture" selects the starting point: "two_plot", "strip" or "default".
EpisodeConfig episode_config_from_json(const Json& j);
Json to_json(const EpisodeConfig& c);

Json to_json(const EpisodeReport& r);
Json to_json(const TickLog& t);
Json to_json(const GeoPolygon& p);
Json to_json(const VehiclePose& p);

// Parses text and maps syntax errors to ConfigInvalid.
Json parse_json(const std::string& text, const std::string& what);

}  // namespace reaper
