#include "mpp/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mpp/errors.hpp"

namespace mpp {

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::string> dates;
    std::vector<std::vector<double>> rows;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(pos)));
            return out;
        }
        out.push_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
}

std::string where(std::string_view source, std::size_t row, std::size_t col) {
    return std::string(source) + ": row " + std::to_string(row) + ", column " + std::to_string(col);
}

double parse_cell(std::string_view cell, std::string_view source, std::size_t row, std::size_t col) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = first + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        raise(ErrorCode::ParseError, where(source, row, col) + ": cannot parse '" + std::string(cell) + "' as a number");
    }
    return value;
}

Table read_table(std::string_view text, std::string_view source) {
    Table table;
    std::size_t row = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++row;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) {
            if (pos > text.size()) break;
            continue;
        }
        auto cells = split(line);
        if (table.header.empty()) {
            if (cells.size() < 2 || cells[0] != "date") {
                raise(ErrorCode::ParseError, where(source, row, 1) + ": header must be 'date,<label>...'");
            }
            for (std::size_t c = 1; c < cells.size(); ++c) {
                if (cells[c].empty()) raise(ErrorCode::ParseError, where(source, row, c + 1) + ": empty label");
                table.header.emplace_back(cells[c]);
            }
            continue;
        }
        if (cells.size() != table.header.size() + 1) {
            raise(ErrorCode::RaggedRow, where(source, row, cells.size()) + ": expected " +
                                            std::to_string(table.header.size() + 1) + " cells, found " +
                                            std::to_string(cells.size()));
        }
        if (!is_iso_date(cells[0])) {
            raise(ErrorCode::ParseError, where(source, row, 1) + ": invalid date '" + std::string(cells[0]) + "'");
        }
        if (!table.dates.empty() && !(table.dates.back() < cells[0])) {
            raise(ErrorCode::NonMonotoneDates, where(source, row, 1) + ": date " + std::string(cells[0]) +
                                                   " does not follow " + table.dates.back());
        }
        table.dates.emplace_back(cells[0]);
        std::vector<double> values(table.header.size());
        for (std::size_t c = 0; c < values.size(); ++c) values[c] = parse_cell(cells[c + 1], source, row, c + 2);
        table.rows.push_back(std::move(values));
    }
    if (table.header.empty()) raise(ErrorCode::InsufficientData, std::string(source) + ": empty file");
    return table;
}

}  // namespace

DataKind parse_data_kind(std::string_view s) {
    if (s == "prices") return DataKind::Prices;
    if (s == "returns") return DataKind::Returns;
    raise(ErrorCode::InvalidArgument, "data kind must be 'prices' or 'returns', got '" + std::string(s) + "'");
}

ReturnsWindow parse_table(std::string_view text, DataKind kind, std::string_view source) {
    Table table = read_table(text, source);
    const std::size_t k = table.header.size();
    const std::size_t rows = table.rows.size();

    if (kind == DataKind::Returns) {
        if (rows < 2) raise(ErrorCode::InsufficientData, std::string(source) + ": need at least 2 return rows");
        Matrix x(static_cast<Index>(rows), static_cast<Index>(k));
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < k; ++j) x(static_cast<Index>(i), static_cast<Index>(j)) = table.rows[i][j];
        return ReturnsWindow(std::move(table.header), std::move(table.dates), std::move(x));
    }

    if (rows < 3) {
        raise(ErrorCode::InsufficientData, std::string(source) + ": need at least 3 price rows for 2 returns");
    }
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (!(table.rows[i][j] > 0.0))
                raise(ErrorCode::ParseError, where(source, i + 2, j + 2) + ": price must be positive");
    Matrix x(static_cast<Index>(rows - 1), static_cast<Index>(k));
    for (std::size_t i = 1; i < rows; ++i)
        for (std::size_t j = 0; j < k; ++j)
            x(static_cast<Index>(i - 1), static_cast<Index>(j)) = table.rows[i][j] / table.rows[i - 1][j] - 1.0;
    std::vector<std::string> dates(table.dates.begin() + 1, table.dates.end());
    return ReturnsWindow(std::move(table.header), std::move(dates), std::move(x));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ReturnsWindow ingest(const std::filesystem::path& path, DataKind kind) {
    return parse_table(read_text_file(path), kind, path.string());
}

std::string format_double(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) raise(ErrorCode::InvalidArgument, "cannot format number");
    return std::string(buf, ptr);
}

void write_returns_csv(std::ostream& os, const ReturnsWindow& window) {
    os << "date";
    for (const auto& a : window.assets()) os << ',' << a;
    os << '\n';
    for (Index i = 0; i < window.n(); ++i) {
        os << window.dates()[static_cast<std::size_t>(i)];
        for (Index j = 0; j < window.k(); ++j) os << ',' << format_double(window.returns()(i, j));
        os << '\n';
    }
}

void write_returns_csv(const std::filesystem::path& path, const ReturnsWindow& window) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    write_returns_csv(out, window);
    if (!out) raise(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

Vector read_rf_file(const std::filesystem::path& path, const std::vector<std::string>& dates) {
    const std::string source = path.string();
    Table table = read_table(read_text_file(path), source);
    if (table.header.size() != 1) {
        raise(ErrorCode::ParseError, source + ": risk-free file must have exactly one value column");
    }
    if (table.dates != dates) {
        std::size_t i = 0;
        while (i < table.dates.size() && i < dates.size() && table.dates[i] == dates[i]) ++i;
        const std::string got = i < table.dates.size() ? table.dates[i] : "<end of file>";
        const std::string want = i < dates.size() ? dates[i] : "<end of data>";
        raise(ErrorCode::DateMismatch, source + ": date " + got + " does not align with returns date " + want);
    }
    Vector rf(static_cast<Index>(dates.size()));
    for (std::size_t i = 0; i < dates.size(); ++i) rf(static_cast<Index>(i)) = table.rows[i][0];
    return rf;
}

}  // namespace mpp
