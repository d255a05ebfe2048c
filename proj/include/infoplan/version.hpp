#pragma once

namespace infoplan {

inline constexpr const char* kArtifactVersion = "0.1.0";

} // namespace infoplan
