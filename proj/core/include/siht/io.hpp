#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace siht {

/// Shortest round-trip text for v: fixed notation when 1e-6 <= |v| < 1e6,
/// scientific otherwise; "0" for zero, "nan"/"inf"/"-inf" for non-finite values.
std::string format_number(double v);

/// Column-oriented CSV builder. Cells are stored as text; numeric cells go
/// through format_number so reruns produce identical bytes.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& cell(double v);
    CsvTable& cell(std::size_t v);
    CsvTable& cell(std::string_view v);
    CsvTable& cell(const char* v) { return cell(std::string_view(v)); }
    CsvTable& cell(bool v);
    /// Ends the current row; DimensionMismatch if it has the wrong width.
    void end_row();

    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t row_count() const noexcept { return rows_.size(); }
    std::string to_string() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::string> current_;
};

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::vector<PlotSeries> series;
};

/// Standalone SVG line chart. Non-finite points and, on a log axis,
/// non-positive points are skipped.
std::string render_line_plot(const LinePlot& plot);

/// Standalone SVG heatmap of a rows x cols table (row-major), grey scale from
/// the minimum to the maximum value. Large tables are max-pooled down to at
/// most `max_cells` cells per side.
std::string render_heatmap(const std::vector<double>& values, std::size_t rows, std::size_t cols,
                           const std::string& title, std::size_t max_cells = 200);

/// Writes text, creating parent directories.
void write_text(const std::filesystem::path& path, std::string_view text);

} // namespace siht
