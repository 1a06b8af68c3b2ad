#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

// Trace rows and their CSV serialization. Column layout (one lmo_i column per
// oracle of the product domain):
//   iter,time_s,f,primal,dmin,lmo_1,...,lmo_m,f_evals,grad_evals,M_t
// Optional fields serialize as empty cells. Numbers use shortest round-trip
// formatting with a '.' decimal point regardless of locale, so identical runs
// produce identical bytes.

namespace bcfw {

struct TraceRow {
    std::size_t iter = 0;
    double time_s = 0.0;
    double f = 0.0;
    std::optional<double> primal;
    std::optional<double> dmin;
    std::vector<double> lmo;  // cumulative per-oracle calls (real-valued so averages fit)
    double f_evals = 0.0;
    double grad_evals = 0.0;
    std::optional<double> m_value;

    bool operator==(const TraceRow&) const = default;
};

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

inline std::string trace_csv_header(std::size_t num_oracles) {
    std::string h = "iter,time_s,f,primal,dmin";
    for (std::size_t i = 1; i <= num_oracles; ++i) h += ",lmo_" + std::to_string(i);
    h += ",f_evals,grad_evals,M_t";
    return h;
}

// Writes '#'-prefixed metadata lines, the header, then one line per row.
inline void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows,
                            std::size_t num_oracles,
                            const std::vector<std::string>& metadata = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
    for (const auto& line : metadata) out << "# " << line << "\n";
    out << trace_csv_header(num_oracles) << "\n";
    auto cell = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    for (const auto& row : rows) {
        if (row.lmo.size() != num_oracles)
            throw std::invalid_argument("write_trace_csv: row oracle count mismatch");
        out << row.iter << ',' << format_double(row.time_s) << ','
            << format_double(row.f) << ',' << cell(row.primal) << ',' << cell(row.dmin);
        for (double c : row.lmo) out << ',' << format_double(c);
        out << ',' << format_double(row.f_evals) << ',' << format_double(row.grad_evals)
            << ',' << cell(row.m_value) << "\n";
    }
    if (!out) throw std::runtime_error("write_trace_csv: write failed for " + path);
}

struct TraceFile {
    std::vector<std::string> metadata;  // comment lines without the "# " prefix
    std::size_t num_oracles = 0;
    std::vector<TraceRow> rows;
};

inline TraceFile read_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_trace_csv: cannot open " + path);
    TraceFile file;
    std::string line;
    bool saw_header = false;
    auto parse_double = [&](const std::string& s) {
        double v = 0.0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw std::runtime_error("read_trace_csv: bad number '" + s + "' in " + path);
        return v;
    };
    auto parse_optional = [&](const std::string& s) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        return parse_double(s);
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t start = line.size() > 1 && line[1] == ' ' ? 2 : 1;
            file.metadata.push_back(line.substr(start));
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (!saw_header) {
            // 8 fixed columns plus one lmo_i column per oracle.
            if (cells.size() < 9 || cells[0] != "iter")
                throw std::runtime_error("read_trace_csv: unexpected header in " + path);
            file.num_oracles = cells.size() - 8;
            saw_header = true;
            continue;
        }
        if (cells.size() != 8 + file.num_oracles)
            throw std::runtime_error("read_trace_csv: bad row width in " + path);
        TraceRow row;
        row.iter = static_cast<std::size_t>(parse_double(cells[0]));
        row.time_s = parse_double(cells[1]);
        row.f = parse_double(cells[2]);
        row.primal = parse_optional(cells[3]);
        row.dmin = parse_optional(cells[4]);
        row.lmo.resize(file.num_oracles);
        for (std::size_t i = 0; i < file.num_oracles; ++i)
            row.lmo[i] = parse_double(cells[5 + i]);
        row.f_evals = parse_double(cells[5 + file.num_oracles]);
        row.grad_evals = parse_double(cells[6 + file.num_oracles]);
        row.m_value = parse_optional(cells[7 + file.num_oracles]);
        file.rows.push_back(std::move(row));
    }
    if (!saw_header) throw std::runtime_error("read_trace_csv: no header in " + path);
    return file;
}

}  // namespace bcfw
