/*
* Copyright (C) 2026 mvsis contributors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef MVSIS_CSV_HPP
#define MVSIS_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace mvsis {

/// Rectangular numeric table with named columns.
struct Table {
    std::vector<std::string> headers;
    std::vector<std::vector<double>> rows;
};

/// Shortest decimal form that round-trips a 64-bit float (17 significant
/// digits cap).
std::string format_double(double value);

/// Writes the table with a header row, LF line endings and round-trip exact
/// values. Deterministic byte-for-byte for identical input.
void emit_csv(const Table& table, const std::filesystem::path& path);

} // namespace mvsis

#endif
