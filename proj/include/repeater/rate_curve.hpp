#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace repeater {

/// One sampled series y(x).
struct RateCurve {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;

    /// Throws std::invalid_argument unless x is strictly increasing and |x| = |y|.
    void validate() const;
};

/// Several series over a shared x axis, written as one CSV table.
struct CurveTable {
    std::string x_label;
    std::vector<double> x;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> columns;

    void add_column(std::string label, std::vector<double> values);
    void validate() const;
    RateCurve curve(std::size_t column) const;
};

/// Formats a double for CSV/JSON output: shortest round-trip representation,
/// "inf" for unbounded values.
std::string format_number(double v);

/// Writes `# key: value` header lines followed by a CSV body.
void write_csv(std::ostream& out, const CurveTable& table,
               const std::vector<std::string>& header_comments);

}  // namespace repeater
