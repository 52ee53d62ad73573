// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace obbkit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs `obbkit <subcommand> [flags]`. `args` excludes the program name.
/// Returns 0 on success, 1 on a usage error (help text goes to `err`) and
/// 2 on a data error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace obbkit
