#include "ddc/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "ddc/errors.hpp"

namespace ddc {

namespace {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos)
            comma = line.size();
        const std::string field = line.substr(pos, comma - pos);
        if (!field.empty()) {
            char* end = nullptr;
            out.push_back(std::strtod(field.c_str(), &end));
        }
        pos = comma + 1;
        if (comma == line.size())
            break;
    }
    return out;
}

} // namespace

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out)
        throw InvalidParameter("cannot open for writing: " + path);
    out << m.rows() << "," << m.cols() << "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j)
                out << ",";
            out << format_double(m(i, j));
        }
        out << "\n";
    }
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidParameter("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw InvalidParameter("missing header in " + path);
    const std::vector<double> dims = parse_row(line);
    if (dims.size() != 2)
        throw InvalidParameter("malformed header in " + path);
    const std::size_t rows = static_cast<std::size_t>(dims[0]);
    const std::size_t cols = static_cast<std::size_t>(dims[1]);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!std::getline(in, line))
            throw InvalidParameter("truncated matrix in " + path);
        const std::vector<double> row = parse_row(line);
        if (row.size() != cols)
            throw InvalidParameter("ragged row in " + path);
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = row[j];
    }
    return m;
}

void write_trace_csv(const std::string& path, const Trace& trace) {
    const std::size_t count = trace.state_dims.size();
    for (std::size_t n : trace.state_dims)
        if (n != 2)
            throw InvalidParameter("trace export assumes [position, velocity] subsystems");

    std::ofstream out(path);
    if (!out)
        throw InvalidParameter("cannot open for writing: " + path);
    out << "time";
    for (std::size_t i = 1; i <= count; ++i)
        out << ",s_" << i;
    for (std::size_t i = 1; i <= count; ++i)
        out << ",v_" << i;
    for (std::size_t i = 1; i <= count; ++i)
        out << ",u_" << i;
    out << ",V\n";

    for (std::size_t k = 0; k < trace.steps(); ++k) {
        out << format_double(trace.times[k]);
        for (std::size_t i = 0; i < count; ++i)
            out << "," << format_double(trace.states[k][2 * i]);
        for (std::size_t i = 0; i < count; ++i)
            out << "," << format_double(trace.states[k][2 * i + 1]);
        for (double u : trace.inputs[k])
            out << "," << format_double(u);
        out << "," << format_double(trace.lyapunov[k]) << "\n";
    }
}

} // namespace ddc
