#pragma once

namespace varlex {

inline constexpr const char* kVersion = "0.1.0";

}
