#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "markmle/observation.hpp"
#include "markmle/simulate.hpp"

namespace markmle {

// Malformed input text; line is 1-based and counts the header.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Well-formed row that violates an observation invariant; row is 1-based
// over data rows.
class RowError : public std::runtime_error {
public:
    RowError(std::size_t row, const std::string& what)
        : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Reads `t1,...,tk,j,z` rows; z is empty iff j = k + 1.
std::vector<Observation> read_observations(std::istream& in);
std::vector<Observation> read_observations_file(const std::string& path);
void write_observations(std::ostream& out, std::span<const Observation> data);

// Shortest decimal that round-trips; "inf" for +infinity, empty for NaN.
std::string format_number(double v);

void write_table(std::ostream& out, const Table& table);
void write_table_file(const std::string& path, const Table& table);

}  // namespace markmle
