#pragma once

#include "nss/signal.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nss {

struct SpikeTrain;
struct LabeledEvent;

/// Sidecar path for a raw recording: `dir/name.bin` -> `dir/name.meta.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& data_path);

/// Raw little-endian float32, channel-interleaved frames, plus JSON sidecar
/// {"sample_rate_hz", "n_channels", "units"}.
void write_recording(const std::filesystem::path& data_path, const Recording& rec);
Recording read_recording(const std::filesystem::path& data_path);

/// CSV `unit_id,time_s`, rows grouped by unit and sorted by time.
void write_spike_trains_csv(const std::filesystem::path& path, const std::vector<SpikeTrain>& trains);
std::vector<SpikeTrain> read_spike_trains_csv(const std::filesystem::path& path);

/// CSV `time_s,peak_channel`.
void write_detections_csv(const std::filesystem::path& path, const std::vector<Detection>& detections);

/// CSV `time_s,label`; UNASSIGNED is written as -1.
void write_labels_csv(const std::filesystem::path& path, const std::vector<LabeledEvent>& labels);
std::vector<LabeledEvent> read_labels_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace nss
