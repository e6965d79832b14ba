#include "datacollab/matrix_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace dc {

namespace {

constexpr char kMagic[4] = {'D', 'C', 'M', '1'};

void put_u64_le(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64_le(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

void write_dcm1(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.write(kMagic, 4);
  put_u64_le(os, static_cast<std::uint64_t>(m.rows()));
  put_u64_le(os, static_cast<std::uint64_t>(m.cols()));
  for (double v : m.data()) put_u64_le(os, std::bit_cast<std::uint64_t>(v));
  if (!os) throw IoError("write failed: " + path.string());
}

Matrix read_dcm1(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("not a DCM1 file: " + path.string());
  const std::uint64_t rows = get_u64_le(is);
  const std::uint64_t cols = get_u64_le(is);
  if (!is) throw IoError("truncated DCM1 header: " + path.string());
  if (rows > (1ULL << 32) || cols > (1ULL << 32) || (cols != 0 && rows * cols / cols != rows))
    throw IoError("implausible DCM1 dimensions: " + path.string());
  std::vector<double> data(static_cast<std::size_t>(rows * cols));
  for (double& v : data) {
    v = std::bit_cast<double>(get_u64_le(is));
    if (!is) throw IoError("truncated DCM1 payload: " + path.string());
  }
  return Matrix(static_cast<index_t>(rows), static_cast<index_t>(cols), std::move(data));
}

void write_csv(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  char buf[64];
  for (index_t i = 0; i < m.rows(); ++i) {
    for (index_t j = 0; j < m.cols(); ++j) {
      const int n = std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      os.write(buf, n);
      if (j + 1 < m.cols()) os.put(',');
    }
    os.put('\n');
  }
  if (!os) throw IoError("write failed: " + path.string());
}

Matrix read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  std::vector<double> data;
  index_t rows = 0;
  index_t cols = -1;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    index_t line_cols = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc())
        throw IoError("bad numeric field at row " + std::to_string(rows) + " in " + path.string());
      data.push_back(v);
      ++line_cols;
      p = next;
      if (p < end && *p == ',') ++p;
    }
    if (cols == -1) cols = line_cols;
    if (line_cols != cols)
      throw IoError("ragged row " + std::to_string(rows) + " in " + path.string());
    ++rows;
  }
  if (rows == 0) throw IoError("empty CSV: " + path.string());
  return Matrix(rows, cols, std::move(data));
}

}  // namespace dc
