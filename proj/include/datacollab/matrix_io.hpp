#pragma once

#include <filesystem>

#include "datacollab/matrix.hpp"

namespace dc {

/// Binary matrix format "DCM1": the 4 magic bytes "DCM1", rows and cols as
/// little-endian u64, then rows*cols doubles, little-endian, row-major.
void write_dcm1(const Matrix& m, const std::filesystem::path& path);
Matrix read_dcm1(const std::filesystem::path& path);

/// Plain numeric CSV, one row per line. Values are written with enough
/// digits to round-trip doubles exactly.
void write_csv(const Matrix& m, const std::filesystem::path& path);
Matrix read_csv(const std::filesystem::path& path);

}  // namespace dc
