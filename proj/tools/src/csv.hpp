#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "deam/error.hpp"

namespace deam::cli::detail {

class CsvFile {
public:
    CsvFile(const std::filesystem::path& path, std::initializer_list<const char*> header)
        : path_(path), out_(path) {
        if (!out_) throw ConfigError("cannot write " + path.string());
        bool first = true;
        for (const char* h : header) {
            out_ << (first ? "" : ",") << h;
            first = false;
        }
        out_ << '\n';
    }

    void row(std::vector<std::string> fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            // free text (status messages) must not break the column layout
            for (char& ch : fields[i])
                if (ch == ',' || ch == '\n') ch = ';';
            out_ << (i ? "," : "") << fields[i];
        }
        out_ << '\n';
    }

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

/// Splits one CSV line; fields never contain commas in our own files.
std::vector<std::string> split_csv(const std::string& line);

}  // namespace deam::cli::detail
