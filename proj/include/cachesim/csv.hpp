#pragma once

// Minimal CSV assembly. Rows are emitted in a fixed order by the caller;
// fields are joined with commas and must not themselves contain commas.

#include "cachesim/rational.hpp"

#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cachesim {

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void row(std::initializer_list<std::string> fields) {
        bool first = true;
        for (const std::string& f : fields) {
            if (f.find(',') != std::string::npos || f.find('\n') != std::string::npos)
                throw std::invalid_argument("csv: field contains a delimiter: " + f);
            if (!first) out_ << ',';
            out_ << f;
            first = false;
        }
        out_ << '\n';
    }

private:
    std::ostream& out_;
};

inline std::string csv_int(int64_t v) { return std::to_string(v); }

inline std::string csv_big(const BigInt& v) { return v.str(); }

inline std::string csv_float(double v) { return format_g15(v); }

inline std::string csv_float(const Rational& r) { return format_g15(to_double(r)); }

}  // namespace cachesim
