#pragma once

// Minimal SVG charts for quick looks at ensembles and histograms.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace svg {

struct Frame {
    double x0, x1, y0, y1;
    double width = 640, height = 400, margin = 40;

    double px(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
    double py(double y) const { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); }
};

inline std::string header(const Frame& f, const std::string& title) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\">\n"
                  "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n"
                  "<text x=\"%.0f\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">%s</text>\n"
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  f.width, f.height, f.margin, title.c_str(), f.margin, f.height - f.margin, f.width - f.margin,
                  f.height - f.margin, f.margin, f.margin, f.margin, f.height - f.margin);
    return buf;
}

inline void write(const std::filesystem::path& path, const std::string& body) {
    std::FILE* out = std::fopen(path.string().c_str(), "wb");
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    std::fputs(body.c_str(), out);
    std::fputs("</svg>\n", out);
    std::fclose(out);
}

/// Step plots of several series sampled at x = k / (len - 1).
inline void step_lines(const std::filesystem::path& path, const std::vector<std::vector<double>>& series,
                       const std::string& title) {
    double lo = 0.0, hi = 0.0;
    for (const auto& s : series)
        for (double v : s) lo = std::min(lo, v), hi = std::max(hi, v);
    if (hi == lo) hi = lo + 1.0;
    const Frame f{0.0, 1.0, lo, hi};
    std::string body = header(f, title);
    const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        if (s.size() < 2) continue;
        body += "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" + std::string(colors[k % 10]) + "\" points=\"";
        char buf[64];
        const double n = static_cast<double>(s.size() - 1);
        for (std::size_t m = 0; m < s.size(); ++m) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", f.px(m / n), f.py(s[m]));
            body += buf;
            if (m + 1 < s.size()) {
                std::snprintf(buf, sizeof buf, "%.2f,%.2f ", f.px((m + 1) / n), f.py(s[m]));
                body += buf;
            }
        }
        body += "\"/>\n";
    }
    write(path, body);
}

inline void bars(const std::filesystem::path& path, const std::vector<double>& edges,
                 const std::vector<std::size_t>& counts, const std::string& title) {
    const std::size_t top = counts.empty() ? 1 : std::max<std::size_t>(1, *std::max_element(counts.begin(), counts.end()));
    const Frame f{edges.front(), edges.back(), 0.0, static_cast<double>(top)};
    std::string body = header(f, title);
    char buf[256];
    for (std::size_t b = 0; b < counts.size(); ++b) {
        const double x = f.px(edges[b]), w = f.px(edges[b + 1]) - x, y = f.py(static_cast<double>(counts[b]));
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"#4c72b0\" stroke=\"white\"/>\n", x,
                      y, w, f.py(0.0) - y);
        body += buf;
    }
    write(path, body);
}

}  // namespace svg
