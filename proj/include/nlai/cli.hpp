#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nlai/config.hpp"

namespace nlai::cli {

inline constexpr const char *kVersion = "0.1.0";

enum ExitCode : int { ok = 0, usage_error = 1, numerical_failure = 2 };

struct RunManifest {
    std::string subcommand;
    config::ParamMap params;
    std::string version = kVersion;
    std::string timestamp;

    std::string to_json(int indent = 2) const;
    static RunManifest from_json(const std::string &text);
};

/// Entry point behind the executable. `args` excludes the program name.
/// Data goes to files or `out`; diagnostics only to `err`.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Formats a double with 12 significant digits, locale independent.
std::string format_number(double x);

} // namespace nlai::cli
