#include "hypetc/csv.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <system_error>

#include "hypetc/error.hpp"

namespace hypetc {

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", value);
    return buf;
}

void write_row(std::ostream& out, std::span<const double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out << ',';
        out << format_number(v);
        first = false;
    }
    out << '\n';
}

void write_row(std::ostream& out, std::initializer_list<double> values) {
    write_row(out, std::span<const double>(values.begin(), values.size()));
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw Error(ErrorCode::OutputDirUnwritable,
                        "cannot create " + path.parent_path().string() + ": " + ec.message());
        }
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::OutputDirUnwritable, "cannot write " + tmp.string());
        }
        writer(out);
        out.flush();
        if (!out) {
            throw Error(ErrorCode::OutputDirUnwritable, "write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorCode::OutputDirUnwritable,
                    "cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

}  // namespace hypetc
