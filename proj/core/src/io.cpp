#include <algorithm>
#include "flockdyn/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "flockdyn/error.hpp"
#include "flockdyn/parallel.hpp"

namespace flockdyn {

int resolve_thread_count(int requested) {
    const unsigned hw = std::thread::hardware_concurrency();
    int count = requested > 0 ? requested : (hw == 0 ? 1 : static_cast<int>(hw));
    if (const char* env = std::getenv("FLOCKDYN_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) count = std::min(count, cap);
    }
    return count;
}

namespace io {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string csv_row(const std::vector<double>& values) {
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) row += ',';
        row += format_double(values[i]);
    }
    row += '\n';
    return row;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << contents;
    if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

}  // namespace io
}  // namespace flockdyn
