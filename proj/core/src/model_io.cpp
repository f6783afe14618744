#include "nss/config.hpp"
#include "nss/io.hpp"
#include "nss/network.hpp"

#include <cstdint>
#include <cstring>

namespace nss {

namespace {

constexpr char kMagic[4] = {'N', 'S', 'S', 'M'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_model(const std::filesystem::path& path, const NssModel& model) {
    const std::string cfg = to_json(model.config());
    std::string out(kMagic, 4);
    auto put = [&](std::uint32_t v) {
        char b[4];
        std::memcpy(b, &v, 4);
        out.append(b, 4);
    };
    put(kVersion);
    put(static_cast<std::uint32_t>(cfg.size()));
    out += cfg;
    out += serialize_dictionary(model.layer1());
    out += serialize_dictionary(model.layer2());
    write_text_file(path, out);
}

NssModel load_model(const std::filesystem::path& path) {
    const std::string bytes = read_text_file(path);
    const std::string_view view(bytes);
    if (view.size() < 12 || std::memcmp(view.data(), kMagic, 4) != 0) {
        throw SchemaError(path.string() + ": not a model file");
    }
    std::uint32_t version, len;
    std::memcpy(&version, view.data() + 4, 4);
    std::memcpy(&len, view.data() + 8, 4);
    if (version != kVersion) throw SchemaError(path.string() + ": unsupported model version " + std::to_string(version));
    if (view.size() < 12 + static_cast<std::size_t>(len)) throw SchemaError(path.string() + ": truncated config");
    NssConfig cfg = nss_config_from_json(std::string(view.substr(12, len)));
    std::size_t at = 12 + len;
    std::size_t used = 0;
    Dictionary d1 = deserialize_dictionary(view.substr(at), &used);
    at += used;
    Dictionary d2 = deserialize_dictionary(view.substr(at), &used);
    at += used;
    if (at != view.size()) throw SchemaError(path.string() + ": trailing bytes after model");
    return NssModel(std::move(cfg), std::move(d1), std::move(d2));
}

}  // namespace nss
