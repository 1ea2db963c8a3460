#pragma once

#include <string>

#include "ddc/evaluation.hpp"
#include "ddc/matrix.hpp"

namespace ddc {

/// Matrix file format: a "rows,cols" header line followed by one CSV row
/// per matrix row, entries printed with full round-trip precision.
void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);

/// Chain trace format: header time,s_1..s_M,v_1..v_M,u_1..u_M,V and one
/// row per recorded step.
void write_trace_csv(const std::string& path, const Trace& trace);

} // namespace ddc
