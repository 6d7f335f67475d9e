#pragma once

// JSON readers/writers for the configuration structs. Readers apply the keys
// present onto the given defaults and reject unknown keys.

#include "powerloc/hmm.hpp"
#include "powerloc/preprocess.hpp"
#include "powerloc/synthworld.hpp"
#include "powerloc/tracker.hpp"

#include "json_util.hpp"

#include <string>

namespace powerloc::detail {

void read_into(const json& value, const std::string& context, PreprocessConfig& out);
void read_into(const json& value, const std::string& context, TrackerConfig& out);
void read_into(const json& value, const std::string& context, InferenceConfig& out);
void read_into(const json& value, const std::string& context, WorldConfig& out);

[[nodiscard]] json to_json(const PreprocessConfig& cfg);
[[nodiscard]] json to_json(const TrackerConfig& cfg);
[[nodiscard]] json to_json(const InferenceConfig& cfg);
[[nodiscard]] json to_json(const WorldConfig& cfg);

}  // namespace powerloc::detail
