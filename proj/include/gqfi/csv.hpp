#pragma once

#include <string>
#include <vector>

namespace gqfi {

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// CSV emitter with '#'-prefixed header comments; numeric cells use
/// shortest round-trip formatting so identical runs produce identical bytes.
class CsvWriter {
public:
    void comment(const std::string& line);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);
    void row_values(const std::vector<double>& values);
    const std::string& str() const { return buf_; }
    void write_file(const std::string& path) const;

private:
    std::string buf_;
};

}  // namespace gqfi
