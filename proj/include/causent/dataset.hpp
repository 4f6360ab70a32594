#pragma once

#include <cstddef>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "causent/errors.hpp"

namespace causent {

// A multivariate time series: d named columns sampled at T uniform
// timepoints. Column-major storage, one vector per series.
class TimeSeriesDataset {
public:
    TimeSeriesDataset() = default;

    TimeSeriesDataset(std::vector<std::string> names, std::vector<std::vector<double>> columns)
        : names_(std::move(names)), columns_(std::move(columns)) {
        if (names_.size() != columns_.size())
            throw InvalidArgumentError("dataset: names/columns size mismatch");
        for (const auto& c : columns_) {
            if (c.size() != length())
                throw InvalidArgumentError("dataset: ragged columns");
        }
    }

    std::size_t num_series() const { return columns_.size(); }
    std::size_t length() const { return columns_.empty() ? 0 : columns_.front().size(); }

    const std::string& name(std::size_t i) const { return names_.at(i); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<double>& column(std::size_t i) const { return columns_.at(i); }

    double value(std::size_t series, std::size_t t) const { return columns_.at(series).at(t); }

    // Reorders the columns; perm[i] is the source index of new column i.
    TimeSeriesDataset permuted(const std::vector<std::size_t>& perm) const {
        if (perm.size() != num_series())
            throw InvalidArgumentError("dataset: permutation size mismatch");
        std::vector<std::string> n;
        std::vector<std::vector<double>> c;
        for (std::size_t src : perm) {
            n.push_back(names_.at(src));
            c.push_back(columns_.at(src));
        }
        return TimeSeriesDataset(std::move(n), std::move(c));
    }

    // First row is the header; one row per timepoint. Missing or non-numeric
    // cells are rejected with the offending line number.
    static TimeSeriesDataset from_csv(std::istream& in) {
        std::string line;
        if (!std::getline(in, line))
            throw CsvParseError("csv line 1: empty input");
        std::vector<std::string> names = split_row(line);
        if (names.empty())
            throw CsvParseError("csv line 1: empty header");

        std::vector<std::vector<double>> cols(names.size());
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() && in.peek() == EOF) break;  // trailing newline
            std::vector<std::string> cells = split_row(line);
            if (cells.size() != names.size())
                throw CsvParseError("csv line " + std::to_string(lineno) + ": expected " +
                                    std::to_string(names.size()) + " cells, got " +
                                    std::to_string(cells.size()));
            for (std::size_t i = 0; i < cells.size(); ++i) {
                try {
                    std::size_t pos = 0;
                    double v = std::stod(cells[i], &pos);
                    if (pos != cells[i].size())
                        throw std::invalid_argument("trailing garbage");
                    cols[i].push_back(v);
                } catch (const std::exception&) {
                    throw CsvParseError("csv line " + std::to_string(lineno) + ", column '" +
                                        names[i] + "': not a number: '" + cells[i] + "'");
                }
            }
        }
        return TimeSeriesDataset(std::move(names), std::move(cols));
    }

    static TimeSeriesDataset from_csv_file(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw CsvParseError("cannot open csv file: " + path);
        return from_csv(f);
    }

    void to_csv(std::ostream& out) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            out << (i ? "," : "") << names_[i];
        out << '\n';
        out.precision(17);
        for (std::size_t t = 0; t < length(); ++t) {
            for (std::size_t i = 0; i < columns_.size(); ++i)
                out << (i ? "," : "") << columns_[i][t];
            out << '\n';
        }
    }

private:
    static std::vector<std::string> split_row(const std::string& line) {
        std::vector<std::string> out;
        std::string cell;
        std::stringstream ss(line);
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
                cell.pop_back();
            std::size_t start = cell.find_first_not_of(' ');
            out.push_back(start == std::string::npos ? "" : cell.substr(start));
        }
        if (!line.empty() && line.back() == ',') out.push_back("");
        return out;
    }

    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

}  // namespace causent
