#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace tether {

/// Formats a double with round-trip precision (shortest form that parses back exactly).
std::string format_double(double v);

/// Minimal CSV writer. The file is written to a temporary sibling and
/// renamed into place on close(), so readers never see partial output.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(bool v) { return cell(std::string_view(v ? "true" : "false")); }
    CsvWriter& cell(std::string_view v);
    CsvWriter& cell(const char* v) { return cell(std::string_view(v)); }
    void end_row();
    void close();

private:
    void begin_cell();

    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream out_;
    bool row_started_ = false;
    bool closed_ = false;
};

/// Parsed CSV: header plus rows of string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Writes text atomically (temporary file + rename).
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace tether
