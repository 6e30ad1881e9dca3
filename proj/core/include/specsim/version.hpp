#pragma once

namespace specsim {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;  // JSONL / summary schema version

}  // namespace specsim
