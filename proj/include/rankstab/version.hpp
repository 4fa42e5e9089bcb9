#pragma once

namespace rankstab {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace rankstab
