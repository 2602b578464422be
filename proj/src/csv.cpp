#include <cointbreak/csv.hpp>
#include <cointbreak/errors.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cointbreak {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) {
        ++a;
    }
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) {
        --b;
    }
    std::string out = s.substr(a, b - a);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
        out = out.substr(1, out.size() - 2);
    }
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
            field.push_back(c);
        } else if (c == ',' && !quoted) {
            out.push_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.push_back(trim(field));
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_number(const std::string& cell, std::size_t line, std::size_t column) {
    auto fail = [&](const std::string& why) {
        std::ostringstream msg;
        msg << "line " << line << ", column " << column << ": " << why;
        throw InputError(msg.str());
    };
    if (cell.empty()) {
        fail("missing value");
    }
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') {
        ++first;
    }
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) {
        fail("not a number: '" + cell + "'");
    }
    if (!std::isfinite(value)) {
        fail("missing or non-finite value '" + cell + "'");
    }
    return value;
}

} // namespace

TimeSeriesData SeriesTable::to_data() const {
    return TimeSeriesData(y, x, labels);
}

SeriesTable parse_series_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split(line);
            break;
        }
    }
    if (header.empty()) {
        throw InputError("empty input: a header row is required");
    }
    const bool dated = lower(header.front()) == "date";
    const std::size_t first_value = dated ? 1 : 0;
    if (header.size() < first_value + 2) {
        throw InputError("need a response column and at least one regressor column");
    }
    for (const auto& name : header) {
        if (name.empty()) {
            throw InputError("header has an empty column name");
        }
    }

    SeriesTable table;
    table.response = header[first_value];
    table.columns.assign(header.begin() + static_cast<std::ptrdiff_t>(first_value + 1), header.end());
    const std::size_t width = header.size();
    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != width) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected " << width << " fields, found " << cells.size();
            throw InputError(msg.str());
        }
        if (dated) {
            if (cells[0].empty()) {
                throw InputError("line " + std::to_string(line_no) + ": missing date label");
            }
            table.labels.push_back(cells[0]);
        }
        for (std::size_t c = first_value; c < width; ++c) {
            values.push_back(parse_number(cells[c], line_no, c + 1));
        }
        ++rows;
    }
    if (rows == 0) {
        throw InputError("no data rows");
    }
    const auto n = static_cast<Eigen::Index>(width - first_value - 1);
    const auto r = static_cast<Eigen::Index>(rows);
    table.y.resize(r);
    table.x.resize(r, n);
    const auto stride = n + 1;
    for (Eigen::Index i = 0; i < r; ++i) {
        table.y(i) = values[static_cast<std::size_t>(i * stride)];
        for (Eigen::Index j = 0; j < n; ++j) {
            table.x(i, j) = values[static_cast<std::size_t>(i * stride + 1 + j)];
        }
    }
    return table;
}

SeriesTable read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    return parse_series_csv(in);
}

void write_residuals_csv(std::ostream& out, const TimeSeriesData& data, const BreakModel& model) {
    const bool dated = !data.labels().empty();
    out << "t";
    if (dated) {
        out << ",date";
    }
    out << ",y,fitted,residual\n";
    char buf[160];
    for (std::size_t t = 1; t <= data.length(); ++t) {
        const auto row = static_cast<Eigen::Index>(t - 1);
        const double y = data.y()(row);
        const double resid = model.residuals(row);
        out << data.original_index(t);
        if (dated) {
            out << ',' << data.labels()[t - 1];
        }
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", y, y - resid, resid);
        out << buf;
    }
}

} // namespace cointbreak
