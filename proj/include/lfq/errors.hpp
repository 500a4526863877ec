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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lfq {

/// Base class for all lfqkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed textual input. Carries the byte offset (for string parsers)
/// or the 1-based row number (for table readers) of the offending input.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t where)
        : Error(msg), where_(where) {}
    std::size_t where() const { return where_; }

private:
    std::size_t where_;
};

/// Structurally valid input that violates a data contract
/// (value out of range, missing file, unmapped accession, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// An operation received no usable observations.
class NoDataError : public Error {
public:
    using Error::Error;
};

/// The damped normal equations could not be solved at any damping level.
class SingularNormalEquations : public Error {
public:
    using Error::Error;
};

/// A statistic is undefined for the given inputs (e.g. an empty group).
class UndefinedStatistic : public Error {
public:
    using Error::Error;
};

} // namespace lfq
