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
#include "lfq/tsv.hpp"

#include <charconv>
#include <cstdio>
#include <system_error>

#include "lfq/errors.hpp"
#include "lfq/types.hpp"

namespace lfq {

std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_int(long long v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return out;
}

void TsvReader::open_and_read_header(const std::filesystem::path& path) {
    path_ = path.string();
    in_.open(path);
    if (!in_)
        throw DataError("cannot open '" + path_ + "'");
    std::string line;
    if (!std::getline(in_, line))
        throw ParseError(path_ + ": empty file, header expected", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    header_ = split_tabs(line);
}

TsvReader::TsvReader(const std::filesystem::path& path,
                     const std::vector<std::string>& columns) {
    open_and_read_header(path);
    if (header_ != columns) {
        std::string want;
        for (const auto& c : columns) want += (want.empty() ? "" : "\t") + c;
        throw ParseError(path_ + ": header mismatch, expected '" + want + "'", 1);
    }
}

TsvReader::TsvReader(const std::filesystem::path& path,
                     const std::vector<std::string>& fixed_prefix,
                     std::size_t min_columns) {
    open_and_read_header(path);
    bool ok = header_.size() >= min_columns && header_.size() >= fixed_prefix.size();
    for (std::size_t i = 0; ok && i < fixed_prefix.size(); ++i)
        ok = header_[i] == fixed_prefix[i];
    if (!ok)
        throw ParseError(path_ + ": unexpected header", 1);
}

std::optional<std::vector<std::string>> TsvReader::next() {
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++row_;
    auto fields = split_tabs(line);
    if (fields.size() != header_.size())
        fail("expected " + fmt_int(static_cast<long long>(header_.size())) +
             " columns, found " + fmt_int(static_cast<long long>(fields.size())));
    return fields;
}

void TsvReader::fail(const std::string& msg) const {
    throw ParseError(path_ + ": row " + fmt_int(static_cast<long long>(row_)) +
                         ": " + msg,
                     row_);
}

double TsvReader::as_double(const std::string& field,
                            const std::string& column) const {
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        fail("column '" + column + "': cannot parse number '" + field + "'");
    return v;
}

long long TsvReader::as_int(const std::string& field,
                            const std::string& column) const {
    long long v = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        fail("column '" + column + "': cannot parse integer '" + field + "'");
    return v;
}

TsvWriter::TsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& columns)
    : path_(path.string()), n_columns_(columns.size()) {
    out_.open(path, std::ios::binary); // binary: '\n' endings everywhere
    if (!out_)
        throw DataError("cannot open '" + path_ + "' for writing");
    row(columns);
}

void TsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != n_columns_)
        throw DataError(path_ + ": row width " +
                        fmt_int(static_cast<long long>(fields.size())) +
                        " does not match header width " +
                        fmt_int(static_cast<long long>(n_columns_)));
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << '\t';
        out_ << fields[i];
    }
    out_ << '\n';
}

std::string to_string(Measure m) {
    return m == Measure::spectral_count ? "count" : "abundance";
}
std::string to_string(Level l) {
    switch (l) {
        case Level::species: return "species";
        case Level::peptide: return "peptide";
        default: return "protein";
    }
}
std::string to_string(Group g) {
    return g == Group::cases ? "case" : "control";
}
Measure measure_from_string(const std::string& s) {
    if (s == "count") return Measure::spectral_count;
    if (s == "abundance") return Measure::ion_abundance;
    throw DataError("unknown measure '" + s + "' (expected count|abundance)");
}
Level level_from_string(const std::string& s) {
    if (s == "species") return Level::species;
    if (s == "peptide") return Level::peptide;
    if (s == "protein") return Level::protein;
    throw DataError("unknown level '" + s + "'");
}
Group group_from_string(const std::string& s) {
    if (s == "case") return Group::cases;
    if (s == "control") return Group::controls;
    throw DataError("unknown group '" + s + "' (expected case|control)");
}

} // namespace lfq
