#include "icuharm/csv.hpp"

#include "icuharm/error.hpp"

namespace icuharm {

CsvReader::CsvReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary), buf_(1 << 16) {
    if (!in_) throw Error(Errc::missing_file, path.string());
    if (!read_record(header_)) {
        throw Error(Errc::coercion_error, path.string() + ": missing header row");
    }
    if (!header_.empty() && header_[0].size() >= 3 && header_[0].compare(0, 3, "\xEF\xBB\xBF") == 0) {
        header_[0].erase(0, 3);
    }
}

int CsvReader::get() {
    if (pos_ == len_) {
        in_.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        len_ = static_cast<std::size_t>(in_.gcount());
        pos_ = 0;
        if (len_ == 0) return -1;
    }
    return static_cast<unsigned char>(buf_[pos_++]);
}

bool CsvReader::next(std::vector<std::string>& fields) {
    for (;;) {
        if (!read_record(fields)) return false;
        // Blank lines carry no record.
        if (fields.size() == 1 && fields[0].empty()) continue;
        return true;
    }
}

bool CsvReader::read_record(std::vector<std::string>& fields) {
    fields.clear();
    record_line_ = line_;
    int ch = get();
    if (ch < 0) return false;
    std::string field;
    bool quoted = false;
    for (;;) {
        if (quoted) {
            if (ch < 0) {
                throw Error(Errc::coercion_error, path_.string() + ":" + std::to_string(record_line_) +
                                                      ": unterminated quoted field");
            }
            if (ch == '"') {
                int nx = get();
                if (nx == '"') {
                    field += '"';
                } else {
                    quoted = false;
                    ch = nx;
                    continue;
                }
            } else {
                if (ch == '\n') ++line_;
                field += static_cast<char>(ch);
            }
            ch = get();
            continue;
        }
        if (ch < 0 || ch == '\n') {
            if (ch == '\n') ++line_;
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(std::move(field));
            return true;
        }
        if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '"' && field.empty()) {
            quoted = true;
        } else {
            field += static_cast<char>(ch);
        }
        ch = get();
    }
}

}  // namespace icuharm
