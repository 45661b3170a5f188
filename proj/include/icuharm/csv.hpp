#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace icuharm {

/// Streaming reader for comma-separated files with double-quote quoting,
/// doubled-quote escapes, CRLF line ends and quoted embedded newlines.
class CsvReader {
public:
    explicit CsvReader(const std::filesystem::path& path);

    const std::vector<std::string>& header() const noexcept { return header_; }

    /// Reads the next record into `fields`; false at end of input. A field
    /// that was written as an unquoted empty string is returned as empty.
    bool next(std::vector<std::string>& fields);

    /// 1-based physical line on which the last returned record started.
    std::size_t line() const noexcept { return record_line_; }

private:
    bool read_record(std::vector<std::string>& fields);
    int get();

    std::filesystem::path path_;
    std::ifstream in_;
    std::vector<char> buf_;
    std::size_t pos_ = 0;
    std::size_t len_ = 0;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
    std::vector<std::string> header_;
};

}  // namespace icuharm
