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
#include "mvsis/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mvsis {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void emit_csv(const Table& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path.string());
    for (std::size_t c = 0; c < table.headers.size(); ++c) {
        if (c > 0) out << ',';
        out << table.headers[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.headers.size())
            throw std::invalid_argument("emit_csv: ragged row");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out << ',';
            out << format_double(row[c]);
        }
        out << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error("emit_csv: write failed for " + path.string());
}

} // namespace mvsis
