#pragma once

#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spectre/bench/types.hpp"
#include "spectre/errors.hpp"

namespace spectre {

inline constexpr std::string_view kCsvHeader =
    "kernel,L,median_latency_ms,throughput_tok_per_s,ttft_ms,tpot_ms,bytes_state";

namespace detail {

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string sig6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Splits one RFC-4180 record starting at `pos`; advances `pos` past the LF.
inline std::vector<std::string> csv_record(std::string_view text, std::size_t& pos) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    while (pos < text.size()) {
        const char c = text[pos++];
        if (quoted) {
            if (c == '"') {
                if (pos < text.size() && text[pos] == '"') {
                    cur += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace detail

inline std::string format_csv(std::span<const SweepRow> rows) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += detail::csv_field(r.kernel) + ',' + std::to_string(r.L) + ',' + detail::sig6(r.median_latency_ms) + ',' +
               detail::sig6(r.throughput_tok_per_s) + ',' + detail::sig6(r.ttft_ms) + ',' + detail::sig6(r.tpot_ms) +
               ',' + std::to_string(r.bytes_state) + '\n';
    }
    return out;
}

inline void emit_csv(std::span<const SweepRow> rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << format_csv(rows);
    if (!out) throw IoError("write to '" + path + "' failed");
}

inline std::vector<SweepRow> parse_csv(std::string_view text) {
    std::size_t pos = 0;
    const auto header = detail::csv_record(text, pos);
    std::string joined;
    for (std::size_t i = 0; i < header.size(); ++i) joined += (i ? "," : "") + header[i];
    if (joined != kCsvHeader) throw FormatError("csv: unexpected header '" + joined + "'");
    std::vector<SweepRow> rows;
    while (pos < text.size()) {
        const auto f = detail::csv_record(text, pos);
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() != 7) throw FormatError("csv: expected 7 fields, got " + std::to_string(f.size()));
        try {
            rows.push_back({f[0], std::stoull(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4]), std::stod(f[5]),
                            std::stoull(f[6])});
        } catch (const std::logic_error&) {
            throw FormatError("csv: malformed numeric field");
        }
    }
    return rows;
}

}  // namespace spectre
