#pragma once

namespace kirchpass {

inline constexpr const char* artifact_version = "0.1.0";
inline constexpr int report_schema_version = 1;

}  // namespace kirchpass
