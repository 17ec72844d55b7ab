#include "nls/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nls {

static_assert(std::endian::native == std::endian::little,
              "NLSF1 writer assumes a little-endian host");

namespace {
constexpr char kMagic[8] = {'N', 'L', 'S', 'F', '1', '\0', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;
} // namespace

void nlsf1_write(const std::string& path, const ComplexField& field) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    const Grid& g = *field.grid;
    const std::uint32_t dims = static_cast<std::uint32_t>(g.dims());
    const std::uint32_t m = static_cast<std::uint32_t>(g.points());
    const double L = g.extent();
    const std::uint32_t reserved = 0;
    os.write(kMagic, 8);
    os.write(reinterpret_cast<const char*>(&kVersion), 4);
    os.write(reinterpret_cast<const char*>(&reserved), 4);
    os.write(reinterpret_cast<const char*>(&dims), 4);
    os.write(reinterpret_cast<const char*>(&m), 4);
    os.write(reinterpret_cast<const char*>(&L), 8);
    os.write(reinterpret_cast<const char*>(field.values.data()),
             static_cast<std::streamsize>(field.values.size() * sizeof(cd)));
    if (!os) throw ConfigError("write failed: " + path);
}

ComplexField nlsf1_read(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open: " + path);
    char magic[8];
    std::uint32_t version = 0, reserved = 0, dims = 0, m = 0;
    double L = 0.0;
    is.read(magic, 8);
    is.read(reinterpret_cast<char*>(&version), 4);
    is.read(reinterpret_cast<char*>(&reserved), 4);
    is.read(reinterpret_cast<char*>(&dims), 4);
    is.read(reinterpret_cast<char*>(&m), 4);
    is.read(reinterpret_cast<char*>(&L), 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0 || version != kVersion)
        throw ConfigError("not an NLSF1 snapshot: " + path);
    ComplexField field(make_grid(static_cast<int>(dims), L, m));
    is.read(reinterpret_cast<char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(cd)));
    if (!is) throw ConfigError("truncated NLSF1 snapshot: " + path);
    return field;
}

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ConfigError("cannot open for writing: " + tmp);
        os << content;
        if (!os) throw ConfigError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw ConfigError("rename failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace nls
