#pragma once

namespace ringcheck {

constexpr const char* kToolName = "ringcheck";
constexpr const char* kToolVersion = "0.1.0";

}  // namespace ringcheck
