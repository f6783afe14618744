#include "nss/io.hpp"

#include "nss/eval.hpp"

#include <json.hpp>

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace nss {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "recording I/O assumes a little-endian host");

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << text;
    if (!os) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path sidecar_path(const fs::path& data_path) {
    fs::path p = data_path;
    p.replace_extension(".meta.json");
    return p;
}

void write_recording(const fs::path& data_path, const Recording& rec) {
    const long n = rec.sample_count();
    const int ch = rec.channel_count();
    std::vector<float> frames(static_cast<std::size_t>(n) * static_cast<std::size_t>(ch));
    for (long t = 0; t < n; ++t) {
        for (int c = 0; c < ch; ++c) {
            frames[static_cast<std::size_t>(t) * ch + c] = static_cast<float>(rec.samples(c, t));
        }
    }
    std::ofstream os(data_path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + data_path.string());
    os.write(reinterpret_cast<const char*>(frames.data()), static_cast<std::streamsize>(frames.size() * sizeof(float)));
    if (!os) throw IoError("write failed: " + data_path.string());

    nlohmann::ordered_json meta;
    meta["sample_rate_hz"] = rec.sample_rate;
    meta["n_channels"] = ch;
    meta["units"] = rec.units;
    write_text_file(sidecar_path(data_path), meta.dump(2) + "\n");
}

Recording read_recording(const fs::path& data_path) {
    const fs::path meta_path = sidecar_path(data_path);
    if (!fs::exists(meta_path)) throw IoError("missing sidecar: " + meta_path.string());
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_text_file(meta_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(meta_path.string() + ": " + e.what());
    }
    if (!meta.contains("sample_rate_hz") || !meta["sample_rate_hz"].is_number()) {
        throw SchemaError(meta_path.string() + ": missing numeric field sample_rate_hz");
    }
    if (!meta.contains("n_channels") || !meta["n_channels"].is_number_integer()) {
        throw SchemaError(meta_path.string() + ": missing integer field n_channels");
    }
    const double rate = meta["sample_rate_hz"].get<double>();
    const int ch = meta["n_channels"].get<int>();
    if (!(rate > 0.0)) throw SchemaError(meta_path.string() + ": sample_rate_hz must be > 0");
    if (ch < 1) throw SchemaError(meta_path.string() + ": n_channels must be >= 1");
    const std::string units = meta.value("units", std::string("uV"));

    std::ifstream is(data_path, std::ios::binary | std::ios::ate);
    if (!is) throw IoError("cannot open for reading: " + data_path.string());
    const auto bytes = static_cast<std::size_t>(is.tellg());
    const std::size_t frame_bytes = sizeof(float) * static_cast<std::size_t>(ch);
    if (bytes % frame_bytes != 0) {
        throw SchemaError(data_path.string() + ": size is not a whole number of frames");
    }
    is.seekg(0);
    std::vector<float> frames(bytes / sizeof(float));
    is.read(reinterpret_cast<char*>(frames.data()), static_cast<std::streamsize>(bytes));
    if (!is) throw IoError("read failed: " + data_path.string());

    const long n = static_cast<long>(bytes / frame_bytes);
    SampleMatrix samples(ch, n);
    for (long t = 0; t < n; ++t) {
        for (int c = 0; c < ch; ++c) samples(c, t) = frames[static_cast<std::size_t>(t) * ch + c];
    }
    return Recording(std::move(samples), rate, units);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

template <class T>
T parse_field(const std::string& s, const fs::path& path, long line, const char* name) {
    T v{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && *first == ' ') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw SchemaError(path.string() + ": invalid " + name + " '" + s + "'", line);
    }
    return v;
}

/// Reads a two-column CSV with the exact expected header.
template <class Row>
void read_two_column_csv(const fs::path& path, const std::string& header, Row&& on_row) {
    std::istringstream is(read_text_file(path));
    std::string line;
    long lineno = 0;
    if (!std::getline(is, line)) throw SchemaError(path.string() + ": empty file, expected header " + header, 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw SchemaError(path.string() + ": expected header '" + header + "'", 1);
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cols = split_csv_line(line);
        if (cols.size() != 2) throw SchemaError(path.string() + ": expected 2 columns", lineno);
        on_row(cols, lineno);
    }
}

}  // namespace

void write_spike_trains_csv(const fs::path& path, const std::vector<SpikeTrain>& trains) {
    std::ostringstream os;
    os << "unit_id,time_s\n";
    for (const auto& tr : trains) {
        for (double t : tr.times) os << tr.unit_id << ',' << format_double(t) << '\n';
    }
    write_text_file(path, os.str());
}

std::vector<SpikeTrain> read_spike_trains_csv(const fs::path& path) {
    std::map<int, std::vector<double>> by_unit;
    read_two_column_csv(path, "unit_id,time_s", [&](const std::vector<std::string>& cols, long line) {
        const int unit = parse_field<int>(cols[0], path, line, "unit_id");
        const double t = parse_field<double>(cols[1], path, line, "time_s");
        auto& times = by_unit[unit];
        if (!times.empty() && t <= times.back()) {
            throw SchemaError(path.string() + ": times of unit " + std::to_string(unit) + " not increasing", line);
        }
        times.push_back(t);
    });
    std::vector<SpikeTrain> out;
    for (auto& [u, times] : by_unit) out.push_back({u, std::move(times)});
    return out;
}

void write_detections_csv(const fs::path& path, const std::vector<Detection>& detections) {
    std::ostringstream os;
    os << "time_s,peak_channel\n";
    for (const auto& d : detections) os << format_double(d.time_s) << ',' << d.peak_channel << '\n';
    write_text_file(path, os.str());
}

void write_labels_csv(const fs::path& path, const std::vector<LabeledEvent>& labels) {
    std::ostringstream os;
    os << "time_s,label\n";
    for (const auto& e : labels) os << format_double(e.time_s) << ',' << e.label << '\n';
    write_text_file(path, os.str());
}

std::vector<LabeledEvent> read_labels_csv(const fs::path& path) {
    std::vector<LabeledEvent> out;
    read_two_column_csv(path, "time_s,label", [&](const std::vector<std::string>& cols, long line) {
        const double t = parse_field<double>(cols[0], path, line, "time_s");
        const int label = parse_field<int>(cols[1], path, line, "label");
        if (label < kUnassigned) throw SchemaError(path.string() + ": label must be >= -1", line);
        out.push_back({t, label});
    });
    return out;
}

}  // namespace nss
