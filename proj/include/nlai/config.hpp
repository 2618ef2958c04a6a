#pragma once

// Flat key=value run parameters shared by the config file, command-line
// flags and run manifests. Keys are snake_case; the matching flag is the
// kebab-case spelling (n_atoms <-> --n-atoms).

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nlai/interferometer.hpp"
#include "nlai/optimize.hpp"
#include "nlai/trap.hpp"

namespace nlai::config {

enum class KeyKind {
    integer,  // >= 1
    number,   // any finite real
    positive, // finite and > 0
    choice,
    list, // comma-separated finite reals
};

struct KeySpec {
    std::string key;
    std::string default_value;
    std::string unit;
    std::string help;
    KeyKind kind;
    std::vector<std::string> choices;
};

const std::vector<KeySpec> &key_specs();
const KeySpec *find_key(std::string_view key);

using ParamMap = std::map<std::string, std::string>;

ParamMap default_params();

/// Parses a flat key=value file (# starts a comment). Unknown keys,
/// duplicate keys and lines without '=' throw InvalidInput naming the token.
ParamMap parse_config_text(std::string_view text, std::string_view origin = "config");
ParamMap read_config_file(const std::string &path);

/// Type and range check of every entry; throws InvalidInput naming the key.
void validate_params(const ParamMap &params);

double get_number(const ParamMap &params, const std::string &key);
int get_int(const ParamMap &params, const std::string &key);
const std::string &get_text(const ParamMap &params, const std::string &key);
std::vector<double> get_list(const ParamMap &params, const std::string &key);

std::string kebab_flag(std::string_view key);

/// Trap parameters; frequencies given in Hz are multiplied by 2 pi.
AtomTrapConfig trap_from_params(const ParamMap &params);
DensityModel model_from_params(const ParamMap &params);

/// Dimensionless sequence, either taken directly (source = direct) or built
/// from the trap (source = trap).
SequenceConfig sequence_from_params(const ParamMap &params);

OptimizationSpec spec_from_params(const ParamMap &params);

} // namespace nlai::config
