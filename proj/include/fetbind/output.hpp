#ifndef FETBIND_OUTPUT_HPP
#define FETBIND_OUTPUT_HPP

/**
 * @file output.hpp
 * @brief Deterministic file emission: fixed scientific formatting at a
 *        configured precision, comma-separated tables, ordered JSON, and
 *        write-temp-then-rename atomicity.  Identical inputs produce
 *        byte-identical files.
 */

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace fetbind {

/// Scientific notation with the given number of significant digits.
std::string format_sci(double v, int precision);

/// Writes content to path atomically (temp file + rename).
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// Comma-separated table with a header row; values in scientific notation.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, int precision);

/// Ordered JSON, indented, trailing newline, atomic.
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

}  // namespace fetbind

#endif  // FETBIND_OUTPUT_HPP
