// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <string>

#include "trmusic/scene.hpp"

#include <nlohmann/json_fwd.hpp>

namespace trmusic {

/// Parse a scene document. Unknown keys and invariant violations are
/// rejected with a ConfigError carrying the offending key path; when the
/// raw text is supplied the error message also carries a line number.
SceneConfig scene_from_json(const nlohmann::json& j, const std::string& raw_text = {});

/// Load from a file; parse errors are reported with line:column positions.
SceneConfig load_scene(const std::string& path);

nlohmann::json scene_to_json(const SceneConfig& scene);
void save_scene(const SceneConfig& scene, const std::string& path);

}  // namespace trmusic
