#pragma once

namespace lhv {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace lhv
