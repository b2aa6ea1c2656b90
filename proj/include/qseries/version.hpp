#pragma once

namespace qseries {

inline constexpr const char* engine_version = "0.1.0";

// Serialization format tag; bumped whenever the on-disk layout changes.
inline constexpr const char* format_tag = "QS1";

} // namespace qseries
