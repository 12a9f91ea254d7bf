// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#pragma once

namespace hstbeam {

inline constexpr const char* version = "0.1.0";

}  // namespace hstbeam
