/*
Copyright 2026, lfqkit contributors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace lfq {

/// Shortest round-trip decimal rendering of a double (via std::to_chars).
std::string fmt_double(double v);
std::string fmt_int(long long v);

/// Strict tab-separated reader. Every row must carry exactly as many fields
/// as the header; field values are never quoted or escaped.
class TsvReader {
public:
    /// Opens `path` and validates that the header equals `columns` exactly.
    TsvReader(const std::filesystem::path& path,
              const std::vector<std::string>& columns);

    /// Opens `path` and accepts any header with at least `min_columns`
    /// fields whose leading fields equal `fixed_prefix`. Used for tables
    /// with data-dependent column sets.
    TsvReader(const std::filesystem::path& path,
              const std::vector<std::string>& fixed_prefix, std::size_t min_columns);

    const std::vector<std::string>& header() const { return header_; }

    /// Next data row, or nullopt at end of file. Rows with a field count
    /// different from the header raise ParseError with the row number.
    std::optional<std::vector<std::string>> next();

    /// 1-based number of the row returned by the last next() (header = 1).
    std::size_t row_number() const { return row_; }

    double as_double(const std::string& field, const std::string& column) const;
    long long as_int(const std::string& field, const std::string& column) const;

    [[noreturn]] void fail(const std::string& msg) const;

private:
    void open_and_read_header(const std::filesystem::path& path);

    std::ifstream in_;
    std::string path_;
    std::vector<std::string> header_;
    std::size_t row_ = 1;
};

/// Tab-separated writer with '\n' line endings and fmt_double rendering.
class TsvWriter {
public:
    TsvWriter(const std::filesystem::path& path,
              const std::vector<std::string>& columns);

    void row(const std::vector<std::string>& fields);

private:
    std::ofstream out_;
    std::string path_;
    std::size_t n_columns_;
};

std::vector<std::string> split_tabs(const std::string& line);

} // namespace lfq
