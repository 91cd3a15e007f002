#pragma once

namespace fiberqed {

inline constexpr const char* version = "0.1.0";

}  // namespace fiberqed
