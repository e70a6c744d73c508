#include "siht/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "siht/error.hpp"

namespace siht {

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    const double a = std::abs(v);
    const auto fmt = (a >= 1e-6 && a < 1e6) ? std::chars_format::fixed : std::chars_format::scientific;
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, fmt);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header))
{
    if (header_.empty()) fail(ErrorCode::DimensionMismatch, "CSV needs at least one column");
}

CsvTable& CsvTable::cell(double v)
{
    current_.push_back(format_number(v));
    return *this;
}

CsvTable& CsvTable::cell(std::size_t v)
{
    current_.push_back(std::to_string(v));
    return *this;
}

CsvTable& CsvTable::cell(std::string_view v)
{
    std::string s(v);
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"') q += '"';
            q += ch;
        }
        s = q + "\"";
    }
    current_.push_back(std::move(s));
    return *this;
}

CsvTable& CsvTable::cell(bool v)
{
    current_.emplace_back(v ? "true" : "false");
    return *this;
}

void CsvTable::end_row()
{
    if (current_.size() != header_.size()) {
        fail(ErrorCode::DimensionMismatch, "CSV row has " + std::to_string(current_.size()) +
                                               " cells, header has " +
                                               std::to_string(header_.size()));
    }
    rows_.push_back(std::move(current_));
    current_.clear();
}

std::string CsvTable::to_string() const
{
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const
{
    write_text(path, to_string());
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape_xml(std::string_view s)
{
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

std::string num(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

std::string tick_label(double v)
{
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

} // namespace

std::string render_line_plot(const LinePlot& plot)
{
    const double width = 720, height = 440;
    const double left = 80, right = 170, top = 40, bottom = 60;
    const double pw = width - left - right, ph = height - top - bottom;

    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!plot.log_y || y > 0.0);
    };
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : plot.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            const double y = plot.log_y ? std::log10(s.y[i]) : s.y[i];
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << escape_xml(plot.title) << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        os << "<text x=\"" << num(sx(fx)) << "\" y=\"" << num(top + ph + 18)
           << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
        const double shown = plot.log_y ? std::pow(10.0, fy) : fy;
        os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy(fy) + 4)
           << "\" text-anchor=\"end\">" << tick_label(shown) << "</text>\n";
        os << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << num(sy(fy)) << "\" y2=\""
           << num(sy(fy)) << "\" stroke=\"#dddddd\"/>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\">"
       << escape_xml(plot.x_label) << "</text>\n";
    os << "<text transform=\"translate(18," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape_xml(plot.y_label) << (plot.log_y ? " (log)" : "") << "</text>\n";

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
        std::string pts;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            const double y = plot.log_y ? std::log10(s.y[i]) : s.y[i];
            pts += num(sx(s.x[i])) + "," + num(sy(y)) + " ";
        }
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"" << pts
           << "\"/>\n";
        const double ly = top + 16 + 18.0 * static_cast<double>(k);
        os << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 36 << "\" y1=\"" << ly
           << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << escape_xml(s.name)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string render_heatmap(const std::vector<double>& values, std::size_t rows, std::size_t cols,
                           const std::string& title, std::size_t max_cells)
{
    if (values.size() != rows * cols || rows == 0 || cols == 0) {
        fail(ErrorCode::DimensionMismatch, "heatmap table size");
    }
    const std::size_t fr = (rows + max_cells - 1) / max_cells;
    const std::size_t fc = (cols + max_cells - 1) / max_cells;
    const std::size_t r2 = (rows + fr - 1) / fr;
    const std::size_t c2 = (cols + fc - 1) / fc;
    std::vector<double> pooled(r2 * c2, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            auto& p = pooled[(i / fr) * c2 + j / fc];
            const double v = values[i * cols + j];
            if (std::isfinite(v)) p = std::max(p, v);
        }
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : pooled) {
        if (!std::isfinite(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!std::isfinite(lo)) {
        lo = 0;
        hi = 1;
    }
    const double span = hi > lo ? hi - lo : 1.0;

    const double cell = std::max(2.0, std::min(16.0, 560.0 / static_cast<double>(std::max(r2, c2))));
    const double left = 20, top = 40;
    const double width = left * 2 + cell * static_cast<double>(c2) + 90;
    const double height = top + cell * static_cast<double>(r2) + 30;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
       << num(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">" << escape_xml(title) << "</text>\n";
    for (std::size_t i = 0; i < r2; ++i) {
        for (std::size_t j = 0; j < c2; ++j) {
            const double v = pooled[i * c2 + j];
            const double t = std::isfinite(v) ? (v - lo) / span : 0.0;
            const int g = 255 - static_cast<int>(std::lround(t * 255.0));
            os << "<rect x=\"" << num(left + cell * static_cast<double>(j)) << "\" y=\""
               << num(top + cell * static_cast<double>(i)) << "\" width=\"" << num(cell)
               << "\" height=\"" << num(cell) << "\" fill=\"rgb(" << g << ',' << g << ',' << g
               << ")\"/>\n";
        }
    }
    const double lx = left + cell * static_cast<double>(c2) + 16;
    os << "<text x=\"" << num(lx) << "\" y=\"" << top + 10 << "\">max " << tick_label(hi) << "</text>\n";
    os << "<text x=\"" << num(lx) << "\" y=\"" << top + 28 << "\">min " << tick_label(lo) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

} // namespace siht
