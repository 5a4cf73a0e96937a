#include "rplm/csv_io.hpp"

#include "rplm/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace rplm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool blank(const std::string& line) { return trim(line).empty(); }

}  // namespace

std::string format_double(double value) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        throw Error("failed to format number");
    }
    return std::string(buf.data(), ptr);
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t column) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        throw ParseError("malformed number '" + std::string(cell) + "' in column " + std::to_string(column), row);
    }
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        auto piece = std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        cells.emplace_back(trim(piece));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

Dataset ingest_csv(const std::filesystem::path& path, const ManifoldSpec& manifold, std::size_t p) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open input file " + path.string());
    }
    return read_dataset(in, manifold, p);
}

Dataset read_dataset(std::istream& in, const ManifoldSpec& manifold, std::size_t p) {
    std::string line;
    if (!std::getline(in, line) || blank(line)) {
        throw ParseError("missing header row", 0);
    }
    const std::size_t coords = manifold.coordinate_count();
    const std::size_t header_columns = split_csv_line(line).size();
    if (p == 0) {
        if (header_columns < coords + 2) {
            throw ParseError("header has " + std::to_string(header_columns) + " columns; need y, at least one x and " +
                                 std::to_string(coords) + " coordinates",
                             0);
        }
        p = header_columns - 1 - coords;
    }
    const std::size_t width = 1 + p + coords;
    if (header_columns != width) {
        throw ParseError("header has " + std::to_string(header_columns) + " columns, expected " +
                             std::to_string(width),
                         0);
    }

    std::vector<double> y;
    std::vector<double> x;
    std::vector<ManifoldPoint> t;
    std::vector<double> raw(coords);
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (blank(line)) {
            continue;
        }
        ++row;
        auto cells = split_csv_line(line);
        if (cells.size() != width) {
            throw ParseError("expected " + std::to_string(width) + " columns, found " + std::to_string(cells.size()),
                             row);
        }
        y.push_back(parse_cell(cells[0], row, 1));
        for (std::size_t j = 0; j < p; ++j) {
            x.push_back(parse_cell(cells[1 + j], row, 2 + j));
        }
        for (std::size_t c = 0; c < coords; ++c) {
            raw[c] = parse_cell(cells[1 + p + c], row, 2 + p + c);
        }
        try {
            t.push_back(validate_point(manifold, raw));
        } catch (const InvalidPoint& e) {
            throw ParseError(e.what(), row);
        }
    }
    if (t.empty()) {
        throw ParseError("no data rows", 0);
    }

    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::VectorXd yv = Eigen::Map<Eigen::VectorXd>(y.data(), n);
    Eigen::MatrixXd xm =
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(x.data(), n,
                                                                                          static_cast<Eigen::Index>(p));
    return Dataset(manifold, std::move(yv), std::move(xm), std::move(t));
}

void write_dataset(std::ostream& out, const Dataset& data) {
    out << 'y';
    for (std::size_t j = 1; j <= data.p(); ++j) {
        out << ",x" << j;
    }
    for (std::size_t c = 1; c <= data.manifold().coordinate_count(); ++c) {
        out << ",t" << c;
    }
    out << '\n';
    for (std::size_t i = 0; i < data.n(); ++i) {
        auto r = static_cast<Eigen::Index>(i);
        out << format_double(data.y()(r));
        for (Eigen::Index j = 0; j < data.x().cols(); ++j) {
            out << ',' << format_double(data.x()(r, j));
        }
        for (double c : data.t()[i].coords()) {
            out << ',' << format_double(c);
        }
        out << '\n';
    }
}

std::vector<ManifoldPoint> read_points(std::istream& in, const ManifoldSpec& manifold) {
    std::string line;
    if (!std::getline(in, line) || blank(line)) {
        throw ParseError("missing header row", 0);
    }
    const std::size_t coords = manifold.coordinate_count();
    std::vector<ManifoldPoint> points;
    std::vector<double> raw(coords);
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (blank(line)) {
            continue;
        }
        ++row;
        auto cells = split_csv_line(line);
        if (cells.size() != coords) {
            throw ParseError("expected " + std::to_string(coords) + " coordinates, found " +
                                 std::to_string(cells.size()),
                             row);
        }
        for (std::size_t c = 0; c < coords; ++c) {
            raw[c] = parse_cell(cells[c], row, c + 1);
        }
        try {
            points.push_back(validate_point(manifold, raw));
        } catch (const InvalidPoint& e) {
            throw ParseError(e.what(), row);
        }
    }
    return points;
}

}  // namespace rplm
