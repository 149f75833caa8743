// Copyright 2026 The fluxshot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FLUXSHOT_OUTPUT_H
#define FLUXSHOT_OUTPUT_H

#include <string>
#include <vector>

#include <json.hpp>

namespace fluxshot {

using OrderedJson = nlohmann::ordered_json;

inline constexpr int kJsonDigits = 12;
inline constexpr int kCsvDigits = 10;

/// Pretty JSON with every floating-point value in fixed decimal notation.
/// Non-finite values are written as null.
std::string dump_fixed(const OrderedJson& value, int indent = 2);

/// Minimal CSV table assembled in memory.
class CsvTable {
   public:
    explicit CsvTable(std::vector<std::string> header);
    CsvTable& cell(const std::string& text);
    CsvTable& cell(double value, int digits = kCsvDigits);
    CsvTable& cell_int(long long value);
    void end_row();
    std::string str() const;
    std::size_t rows() const { return rows_; }

   private:
    std::size_t columns_;
    std::size_t pending_ = 0;
    std::size_t rows_ = 0;
    std::string text_;
};

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool points = false;
};

/// Self-contained SVG line/scatter chart.
std::string svg_plot(const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<PlotSeries>& series,
                     bool log_y = false);

}  // namespace fluxshot

#endif
