#pragma once

namespace symspace {

inline constexpr const char* kVersion = "0.1.0";

// Schema tag stamped on every JSON document this toolkit emits.
inline constexpr const char* kSchema = "symspace/1";

}  // namespace symspace
