#include "rbridge/io.hpp"

#include <array>
#include <charconv>
#include <fstream>

#include "rbridge/errors.hpp"

namespace rbridge {

std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::ConfigError, "cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error(ErrorCode::ConfigError, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace rbridge
