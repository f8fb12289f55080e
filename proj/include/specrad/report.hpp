#pragma once

// Small helpers for the tabular outputs: shortest round-trip number
// formatting, versioned CSV headers, and a direct SVG scatter writer.

#include <charconv>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "specrad/errors.hpp"

namespace specrad {

inline constexpr const char* kCsvVersionLine = "# specrad-csv v1";

/// Shortest representation that parses back to the same double.
inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

template <std::integral T>
    requires(!std::is_same_v<T, bool>)
std::string fmt(T x) {
    return std::to_string(x);
}
inline std::string fmt(bool x) { return x ? "true" : "false"; }
inline std::string fmt(const std::string& s) { return s; }
inline std::string fmt(const char* s) { return s; }

/// CSV writer. Values are not quoted; callers only emit identifiers and numbers.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::initializer_list<const char*> columns) : out_(out) {
        out_ << kCsvVersionLine << '\n';
        bool first = true;
        for (const char* c : columns) {
            out_ << (first ? "" : ",") << c;
            first = false;
        }
        out_ << '\n';
        width_ = columns.size();
    }

    template <class... Ts>
    void row(const Ts&... values) {
        static_assert(sizeof...(Ts) > 0);
        if (sizeof...(Ts) != width_) throw Error("csv row width mismatch");
        bool first = true;
        ((out_ << (first ? "" : ",") << fmt(values), first = false), ...);
        out_ << '\n';
    }

private:
    std::ostream& out_;
    std::size_t width_ = 0;
};

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    return out;
}

inline void write_spectrum_csv(std::ostream& out, std::span<const std::complex<double>> points) {
    CsvWriter w(out, {"re", "im"});
    for (const auto& z : points) w.row(z.real(), z.imag());
}

/// Eigenvalue scatter with a reference circle centred at the origin.
inline void write_scatter_svg(std::ostream& out, std::span<const std::complex<double>> points,
                              double circle_radius, const std::string& title) {
    double extent = circle_radius;
    for (const auto& z : points) extent = std::max(extent, std::max(std::abs(z.real()), std::abs(z.imag())));
    if (!(extent > 0.0)) extent = 1.0;
    extent *= 1.05;
    const double size = 600.0;
    const double half = size / 2.0;
    const double s = half / extent;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
    out << "<title>" << title << "</title>\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"0\" y1=\"" << half << "\" x2=\"" << size << "\" y2=\"" << half
        << "\" stroke=\"#bbb\" stroke-width=\"0.5\"/>\n";
    out << "<line x1=\"" << half << "\" y1=\"0\" x2=\"" << half << "\" y2=\"" << size
        << "\" stroke=\"#bbb\" stroke-width=\"0.5\"/>\n";
    const double r = circle_radius * s;
    out << "<path d=\"M " << fmt(half - r) << ' ' << fmt(half) << " A " << fmt(r) << ' ' << fmt(r)
        << " 0 1 0 " << fmt(half + r) << ' ' << fmt(half) << " A " << fmt(r) << ' ' << fmt(r)
        << " 0 1 0 " << fmt(half - r) << ' ' << fmt(half)
        << "\" fill=\"none\" stroke=\"#c00\" stroke-width=\"1.5\"/>\n";
    for (const auto& z : points)
        out << "<circle cx=\"" << fmt(half + z.real() * s) << "\" cy=\"" << fmt(half - z.imag() * s)
            << "\" r=\"1.5\" fill=\"#124\"/>\n";
    out << "</svg>\n";
}

}  // namespace specrad
