#pragma once

#include "nss/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nss::cli {

namespace fs = std::filesystem;

/// File name of the resolved-config snapshot every command writes.
inline constexpr const char* kConfigSnapshot = "config.json";

/// Flags that override values from the config file. Unset fields leave the
/// file (or default) value alone.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> bits;
    std::optional<std::string> neuron;
    std::optional<double> train_window_s;
    std::optional<std::string> detector;
};

/// defaults <- config file <- flags.
ExperimentConfig load_config(const std::optional<fs::path>& config_file, const Overrides& flags);

void cmd_generate(const ExperimentConfig& cfg, const fs::path& out_dir);

struct SortOptions {
    fs::path recording;
    fs::path out_dir;
    std::optional<fs::path> model;
    bool freeze = false;
};
void cmd_sort(const ExperimentConfig& cfg, const SortOptions& opts);

struct EvalOptions {
    fs::path labels;
    fs::path truth;
    fs::path out_dir;
};
void cmd_eval(const ExperimentConfig& cfg, const EvalOptions& opts);

void cmd_baseline(const ExperimentConfig& cfg, const fs::path& recording, const fs::path& out_dir);

struct SweepOptions {
    std::vector<int> bits{1, 2, 4, 8};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    fs::path out_dir;
    int jobs = 1;
};

struct SweepCell {
    int bits = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    CellResult result;
};

/// Runs every (bits, seed) cell; failed cells are recorded, not fatal.
/// Returns the per-cell results in (bits, seed) order.
std::vector<SweepCell> cmd_sweep(const ExperimentConfig& cfg, const SweepOptions& opts);

}  // namespace nss::cli
