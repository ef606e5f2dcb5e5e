#pragma once

namespace bellgames {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kProtocolVersion = 1;

}  // namespace bellgames
