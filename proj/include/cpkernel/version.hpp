#pragma once

namespace cpkernel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cpkernel
