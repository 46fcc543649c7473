#include "repeater/rate_curve.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace repeater {

void RateCurve::validate() const {
    if (x.size() != y.size()) {
        throw std::invalid_argument("RateCurve '" + label + "': x and y differ in length");
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) {
            throw std::invalid_argument("RateCurve '" + label + "': x not strictly increasing");
        }
    }
}

void CurveTable::add_column(std::string label, std::vector<double> values) {
    labels.push_back(std::move(label));
    columns.push_back(std::move(values));
}

void CurveTable::validate() const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        curve(i).validate();
    }
}

RateCurve CurveTable::curve(std::size_t column) const {
    return {labels.at(column), x, columns.at(column)};
}

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const CurveTable& table,
               const std::vector<std::string>& header_comments) {
    table.validate();
    for (const auto& line : header_comments) {
        out << "# " << line << '\n';
    }
    out << table.x_label;
    for (const auto& l : table.labels) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < table.x.size(); ++i) {
        out << format_number(table.x[i]);
        for (const auto& col : table.columns) out << ',' << format_number(col[i]);
        out << '\n';
    }
}

}  // namespace repeater
