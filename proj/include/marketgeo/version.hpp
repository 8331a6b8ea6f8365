#pragma once

namespace marketgeo {

inline constexpr const char* kVersion = "0.1.0";

} // namespace marketgeo
