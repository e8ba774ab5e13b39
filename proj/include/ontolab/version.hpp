#pragma once

namespace ontolab {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ontolab
