// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace cqa {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cqa
