#include "ctlqr/matrix_io.hpp"

#include "ctlqr/errors.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace ctlqr {

void write_matrix(std::ostream& out, const Matrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    const auto old_flags = out.flags();
    const auto old_precision = out.precision();
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ' ';
            out << m(i, j);
        }
        out << '\n';
    }
    out.flags(old_flags);
    out.precision(old_precision);
}

Matrix read_matrix(std::istream& in) {
    long rows = -1;
    long cols = -1;
    if (!(in >> rows >> cols) || rows < 0 || cols < 0) {
        throw DataError("read_matrix: missing or invalid \"rows cols\" header");
    }
    Matrix m(rows, cols);
    for (long i = 0; i < rows; ++i) {
        for (long j = 0; j < cols; ++j) {
            std::string token;
            if (!(in >> token)) {
                throw DataError("read_matrix: truncated data at entry (" + std::to_string(i) +
                                ", " + std::to_string(j) + ")");
            }
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size()) {
                throw DataError("read_matrix: malformed entry '" + token + "'");
            }
            m(i, j) = value;
        }
    }
    if (!m.allFinite()) {
        throw DataError("read_matrix: non-finite entry");
    }
    return m;
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot open " + path.string() + " for writing");
    }
    write_matrix(out, m);
}

Matrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    return read_matrix(in);
}

}  // namespace ctlqr
