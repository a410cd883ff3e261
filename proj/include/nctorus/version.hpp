#pragma once

namespace nct {

inline constexpr const char* kVersion = "0.1.0";

} // namespace nct
