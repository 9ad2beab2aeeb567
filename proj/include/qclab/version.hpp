#pragma once

namespace qclab {

inline constexpr const char* version = "0.1.0";

}
