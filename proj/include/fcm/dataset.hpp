#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fcm {

// One aggregated stream element: a key, the id of the group it belongs to
// and its total frequency. Keys are unique within a dataset.
struct stream_record {
    std::string key;
    std::uint32_t group = 0;
    std::uint64_t count = 0;
};

struct stream_dataset {
    std::vector<stream_record> records;
    std::vector<std::string> group_names;  // indexed by group id

    std::size_t group_count() const noexcept { return group_names.size(); }
};

namespace detail {

// Splits one CSV line (quoted fields, doubled quotes as escapes). The line
// is expected to be complete; embedded newlines are handled by the caller.
inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty()) {
                throw std::runtime_error("csv line " + std::to_string(line_no) +
                                         ": quote inside unquoted field");
            }
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) {
        throw std::runtime_error("csv line " + std::to_string(line_no) + ": unterminated quote");
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline void write_csv_field(std::ostream& out, std::string_view field) {
    const bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

inline std::uint64_t parse_count(const std::string& text, std::size_t line_no) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        throw std::runtime_error("csv line " + std::to_string(line_no) +
                                 ": count is not a positive integer: '" + text + "'");
    }
    std::uint64_t v = 0;
    try {
        v = std::stoull(text);
    } catch (const std::out_of_range&) {
        throw std::runtime_error("csv line " + std::to_string(line_no) + ": count out of range");
    }
    if (v == 0) {
        throw std::runtime_error("csv line " + std::to_string(line_no) + ": count must be positive");
    }
    return v;
}

}  // namespace detail

// Serializes a dataset with the header "element,group,count"; the group
// column carries the group name.
inline void write_dataset_csv(std::ostream& out, const stream_dataset& data) {
    out << "element,group,count\n";
    for (const stream_record& r : data.records) {
        detail::write_csv_field(out, r.key);
        out << ',';
        detail::write_csv_field(out, data.group_names.at(r.group));
        out << ',' << r.count << '\n';
    }
}

inline void write_dataset_csv(const std::string& path, const stream_dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_dataset_csv(out, data);
    if (!out.flush()) throw std::runtime_error("write failed: " + path);
}

struct ingest_options {
    std::vector<std::string> key_columns;  // concatenated to form the element key
    std::string group_column;
    std::string count_column;              // empty: every row counts once
    char key_separator = '|';
};

// Reads a CSV with a header row into a dataset. Rows with the same key are
// aggregated; group labels become dense ids in order of first appearance.
// A key observed under two different groups is an error.
inline stream_dataset ingest_csv(std::istream& in, const ingest_options& opt) {
    if (opt.key_columns.empty()) throw std::invalid_argument("ingest_csv: no key columns");
    if (opt.group_column.empty()) throw std::invalid_argument("ingest_csv: no group column");

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty input, header expected");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = detail::split_csv_line(line, line_no);

    auto column_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw std::runtime_error("csv: missing column '" + name + "'");
    };
    std::vector<std::size_t> key_idx;
    for (const std::string& k : opt.key_columns) key_idx.push_back(column_index(k));
    const std::size_t group_idx = column_index(opt.group_column);
    const bool has_count = !opt.count_column.empty();
    const std::size_t count_idx = has_count ? column_index(opt.count_column) : 0;

    stream_dataset data;
    std::unordered_map<std::string, std::size_t> record_of_key;
    std::unordered_map<std::string, std::uint32_t> group_of_name;

    const bool joined_key = key_idx.size() > 1;
    auto append_key_part = [&](std::string& out, const std::string& value) {
        if (!joined_key) {
            out += value;
            return;
        }
        for (char c : value) {
            if (c == '\\' || c == opt.key_separator) out.push_back('\\');
            out.push_back(c);
        }
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = detail::split_csv_line(line, line_no);
        if (fields.size() != header.size()) {
            throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        std::string key;
        for (std::size_t i = 0; i < key_idx.size(); ++i) {
            if (i > 0) key.push_back(opt.key_separator);
            append_key_part(key, fields[key_idx[i]]);
        }
        if (key.empty()) {
            throw std::runtime_error("csv line " + std::to_string(line_no) + ": empty element key");
        }
        const std::string& group_name = fields[group_idx];
        const std::uint64_t count = has_count ? detail::parse_count(fields[count_idx], line_no) : 1;

        auto [git, inserted] = group_of_name.try_emplace(
            group_name, static_cast<std::uint32_t>(data.group_names.size()));
        if (inserted) data.group_names.push_back(group_name);
        const std::uint32_t group = git->second;

        auto [rit, fresh] = record_of_key.try_emplace(key, data.records.size());
        if (fresh) {
            data.records.push_back({key, group, count});
        } else {
            stream_record& rec = data.records[rit->second];
            if (rec.group != group) {
                throw std::runtime_error("csv line " + std::to_string(line_no) + ": element '" + key +
                                         "' appears under groups '" +
                                         data.group_names[rec.group] + "' and '" + group_name + "'");
            }
            rec.count += count;
        }
    }
    return data;
}

inline stream_dataset ingest_csv(const std::string& path, const ingest_options& opt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return ingest_csv(in, opt);
}

// Readers for datasets in this library's own CSV schema.
inline stream_dataset read_dataset_csv(std::istream& in) {
    ingest_options opt;
    opt.key_columns = {"element"};
    opt.group_column = "group";
    opt.count_column = "count";
    return ingest_csv(in, opt);
}

inline stream_dataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return read_dataset_csv(in);
}

}  // namespace fcm
