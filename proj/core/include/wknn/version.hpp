#pragma once

namespace wknn {

inline constexpr const char* version = "0.1.0";

} // namespace wknn
