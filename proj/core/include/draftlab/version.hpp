#pragma once

namespace draftlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace draftlab
