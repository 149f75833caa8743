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

#include "fluxshot/output.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fluxshot/batch_io.h"
#include "fluxshot/errors.h"

namespace fluxshot {

namespace {

void dump_into(const OrderedJson& v, int indent, int depth, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (v.type()) {
        case OrderedJson::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& item : v.items()) {
                if (!first) {
                    out += ",\n";
                }
                first = false;
                out += pad;
                out += OrderedJson(item.key()).dump();
                out += ": ";
                dump_into(item.value(), indent, depth + 1, out);
            }
            out += "\n" + close + "}";
            return;
        }
        case OrderedJson::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t k = 0; k < v.size(); ++k) {
                if (k > 0) {
                    out += ",\n";
                }
                out += pad;
                dump_into(v[k], indent, depth + 1, out);
            }
            out += "\n" + close + "]";
            return;
        }
        case OrderedJson::value_t::number_float: {
            const double d = v.get<double>();
            out += std::isfinite(d) ? format_fixed(d, kJsonDigits) : "null";
            return;
        }
        default:
            out += v.dump();
    }
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

}  // namespace

std::string dump_fixed(const OrderedJson& value, int indent) {
    std::string out;
    dump_into(value, indent, 0, out);
    out += "\n";
    return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t k = 0; k < header.size(); ++k) {
        text_ += (k ? "," : "") + header[k];
    }
    text_ += "\n";
}

CsvTable& CsvTable::cell(const std::string& text) {
    if (pending_ > 0) {
        text_ += ",";
    }
    text_ += text;
    ++pending_;
    return *this;
}

CsvTable& CsvTable::cell(double value, int digits) { return cell(format_fixed(value, digits)); }

CsvTable& CsvTable::cell_int(long long value) { return cell(std::to_string(value)); }

void CsvTable::end_row() {
    if (pending_ != columns_) {
        throw Error("CSV row has " + std::to_string(pending_) + " cells, expected " +
                    std::to_string(columns_));
    }
    text_ += "\n";
    pending_ = 0;
    ++rows_;
}

std::string CsvTable::str() const { return text_; }

std::string svg_plot(const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<PlotSeries>& series,
                     bool log_y) {
    constexpr double kW = 640;
    constexpr double kH = 420;
    constexpr double kLeft = 70;
    constexpr double kRight = 150;
    constexpr double kTop = 40;
    constexpr double kBottom = 50;
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    auto ty = [log_y](double y) { return log_y ? std::log10(y) : y; };
    double x0 = std::numeric_limits<double>::infinity();
    double x1 = -x0;
    double y0 = x0;
    double y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k]) || (log_y && s.y[k] <= 0.0)) {
                continue;
            }
            x0 = std::min(x0, s.x[k]);
            x1 = std::max(x1, s.x[k]);
            y0 = std::min(y0, ty(s.y[k]));
            y1 = std::max(y1, ty(s.y[k]));
        }
    }
    if (!std::isfinite(x0)) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    if (x1 == x0) {
        x1 = x0 + 1;
    }
    if (y1 == y0) {
        y1 = y0 + 1;
    }
    const double pw = kW - kLeft - kRight;
    const double ph = kH - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kTop + ph - (ty(y) - y0) / (y1 - y0) * ph; };

    std::string o;
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
    o += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    o += "<text x=\"" + format_fixed(kW / 2, 1) + "\" y=\"22\" text-anchor=\"middle\">" +
         escape_xml(title) + "</text>\n";
    o += "<rect x=\"" + format_fixed(kLeft, 1) + "\" y=\"" + format_fixed(kTop, 1) +
         "\" width=\"" + format_fixed(pw, 1) + "\" height=\"" + format_fixed(ph, 1) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0;
        const double fy = y0 + (y1 - y0) * k / 4.0;
        const double sx = kLeft + pw * k / 4.0;
        const double sy = kTop + ph - ph * k / 4.0;
        const double label_y = log_y ? std::pow(10.0, fy) : fy;
        o += "<text x=\"" + format_fixed(sx, 1) + "\" y=\"" + format_fixed(kTop + ph + 16, 1) +
             "\" text-anchor=\"middle\">" + format_fixed(fx, 3) + "</text>\n";
        o += "<text x=\"" + format_fixed(kLeft - 6, 1) + "\" y=\"" + format_fixed(sy + 4, 1) +
             "\" text-anchor=\"end\">" +
             (log_y ? format_fixed(std::log10(label_y), 2) : format_fixed(label_y, 3)) +
             "</text>\n";
    }
    o += "<text x=\"" + format_fixed(kLeft + pw / 2, 1) + "\" y=\"" + format_fixed(kH - 12, 1) +
         "\" text-anchor=\"middle\">" + escape_xml(x_label) + "</text>\n";
    o += "<text x=\"16\" y=\"" + format_fixed(kTop + ph / 2, 1) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + format_fixed(kTop + ph / 2, 1) +
         ")\">" + escape_xml(log_y ? "log10 " + y_label : y_label) + "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % 8];
        const auto& ser = series[s];
        std::string pts;
        for (std::size_t k = 0; k < ser.x.size() && k < ser.y.size(); ++k) {
            if (!std::isfinite(ser.x[k]) || !std::isfinite(ser.y[k]) ||
                (log_y && ser.y[k] <= 0.0)) {
                continue;
            }
            const std::string cx = format_fixed(px(ser.x[k]), 2);
            const std::string cy = format_fixed(py(ser.y[k]), 2);
            if (ser.points) {
                o += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"2\" fill=\"" + color +
                     "\"/>\n";
            } else {
                pts += cx + "," + cy + " ";
            }
        }
        if (!ser.points && !pts.empty()) {
            o += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                 "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        }
        const double ly = kTop + 14 + 18 * static_cast<double>(s);
        o += "<rect x=\"" + format_fixed(kLeft + pw + 10, 1) + "\" y=\"" +
             format_fixed(ly - 9, 1) + "\" width=\"12\" height=\"10\" fill=\"" + color + "\"/>\n";
        o += "<text x=\"" + format_fixed(kLeft + pw + 28, 1) + "\" y=\"" + format_fixed(ly, 1) +
             "\">" + escape_xml(ser.name) + "</text>\n";
    }
    o += "</svg>\n";
    return o;
}

}  // namespace fluxshot
