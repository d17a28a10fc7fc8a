#include "markmle/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace markmle {

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_real(std::string_view field, std::size_t line, const char* what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(line, std::string("cannot parse ") + what + " '" + std::string(field) + "'");
    return v;
}

int parse_int(std::string_view field, std::size_t line) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(line, "cannot parse interval index '" + std::string(field) + "'");
    return v;
}

}  // namespace

std::vector<Observation> read_observations(std::istream& in) {
    std::string text;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, text)) return false;
        ++line_no;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        return true;
    };

    if (!next_line()) throw ParseError(1, "missing header row");
    const auto header = split(text);
    if (header.size() < 3) throw ParseError(1, "header must be t1,...,tk,j,z");
    const std::size_t k = header.size() - 2;
    for (std::size_t i = 0; i < k; ++i)
        if (header[i] != "t" + std::to_string(i + 1)) throw ParseError(1, "header must be t1,...,tk,j,z");
    if (header[k] != "j" || header[k + 1] != "z") throw ParseError(1, "header must be t1,...,tk,j,z");

    std::vector<Observation> data;
    while (next_line()) {
        if (text.empty()) continue;
        const auto fields = split(text);
        if (fields.size() != k + 2)
            throw ParseError(line_no, "expected " + std::to_string(k + 2) + " fields, found " +
                                          std::to_string(fields.size()));
        std::vector<double> times(k);
        for (std::size_t i = 0; i < k; ++i) times[i] = parse_real(fields[i], line_no, "inspection time");
        const int j = parse_int(fields[k], line_no);
        std::optional<double> mark;
        if (!fields[k + 1].empty()) mark = parse_real(fields[k + 1], line_no, "mark");
        try {
            data.emplace_back(std::move(times), j, mark);
        } catch (const DataError& e) {
            throw RowError(data.size() + 1, e.what());
        }
    }
    return data;
}

std::vector<Observation> read_observations_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_observations(in);
}

std::string format_number(double v) {
    if (std::isnan(v)) return {};
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_observations(std::ostream& out, std::span<const Observation> data) {
    const std::size_t k = data.empty() ? 1 : data.front().k();
    for (std::size_t i = 1; i <= k; ++i) out << 't' << i << ',';
    out << "j,z\n";
    for (const auto& obs : data) {
        for (double t : obs.times()) out << format_number(t) << ',';
        out << obs.delta_index() << ',';
        if (obs.mark()) out << format_number(*obs.mark());
        out << '\n';
    }
}

void write_table(std::ostream& out, const Table& table) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
        out << '\n';
    }
}

void write_table_file(const std::string& path, const Table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_table(out, table);
}

}  // namespace markmle
