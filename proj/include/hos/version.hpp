#pragma once

namespace hos {
inline constexpr const char* kToolName = "hos";
inline constexpr const char* kToolVersion = "0.1.0";
}  // namespace hos
