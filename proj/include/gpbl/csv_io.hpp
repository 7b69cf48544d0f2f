#pragma once

#include <string>

#include "gpbl/grid.hpp"

namespace gpbl {

// Field snapshot CSV: header `z[,y],re[,im]`, one node per row, decimal
// values with 17 significant digits (round-trips double bit-exactly).

void write_field_csv(const std::string& path, const RealField& f);
void write_field_csv(const std::string& path, const ComplexField& f);

RealField read_real_field_csv(const std::string& path);
ComplexField read_complex_field_csv(const std::string& path);

/// 17-significant-digit decimal rendering shared by all CSV writers.
std::string format_double(double x);

}  // namespace gpbl
