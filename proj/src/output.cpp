#include "fetbind/output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fetbind {

std::string format_sci(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*e", precision - 1, v);
    return buf;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, int precision) {
    std::string body;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) body += ',';
        body += header[i];
    }
    body += '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) {
            throw std::invalid_argument("csv row width does not match header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) body += ',';
            body += format_sci(row[i], precision);
        }
        body += '\n';
    }
    write_text_atomic(path, body);
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
    write_text_atomic(path, doc.dump(2) + "\n");
}

}  // namespace fetbind
