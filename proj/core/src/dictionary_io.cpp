#include "nss/io.hpp"
#include "nss/lca.hpp"

#include <cstdint>
#include <cstring>

namespace nss {

namespace {

constexpr char kMagic[4] = {'N', 'S', 'S', 'D'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
    std::uint32_t v;
    std::memcpy(&v, bytes.data() + at, 4);
    return v;
}

}  // namespace

std::string serialize_dictionary(const Dictionary& dict) {
    std::string out(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(dict.input_dim()));
    put_u32(out, static_cast<std::uint32_t>(dict.atom_count()));
    // Eigen's default storage is column-major, matching the file layout.
    const auto n = static_cast<std::size_t>(dict.atoms().size());
    out.append(reinterpret_cast<const char*>(dict.atoms().data()), n * sizeof(double));
    return out;
}

Dictionary deserialize_dictionary(std::string_view bytes, std::size_t* consumed) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw SchemaError("dictionary blob: bad magic");
    }
    const std::uint32_t version = get_u32(bytes, 4);
    if (version != kVersion) throw SchemaError("dictionary blob: unsupported version " + std::to_string(version));
    const std::uint32_t rows = get_u32(bytes, 8);
    const std::uint32_t cols = get_u32(bytes, 12);
    const std::size_t payload = static_cast<std::size_t>(rows) * cols * sizeof(double);
    if (bytes.size() < 16 + payload) throw SchemaError("dictionary blob: truncated payload");
    Matrix atoms(rows, cols);
    std::memcpy(atoms.data(), bytes.data() + 16, payload);
    if (consumed != nullptr) *consumed = 16 + payload;
    return Dictionary(std::move(atoms));
}

void save_dictionary(const std::filesystem::path& path, const Dictionary& dict) {
    write_text_file(path, serialize_dictionary(dict));
}

Dictionary load_dictionary(const std::filesystem::path& path) {
    return deserialize_dictionary(read_text_file(path));
}

}  // namespace nss
