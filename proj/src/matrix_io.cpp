#include "spmvprobe/matrix_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string_view>
#include <vector>

#include "spmvprobe/error.hpp"

namespace spmvprobe {

namespace {

enum class MmField { real, integer, pattern };
enum class MmSymmetry { general, symmetric, skew_symmetric };

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::parse_error, "line " + std::to_string(line) + ": " + what);
}

std::string_view skip_ws(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  return s;
}

template <typename T>
bool next_number(std::string_view& s, T& out) {
  s = skip_ws(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc{}) return false;
  s.remove_prefix(static_cast<std::size_t>(res.ptr - s.data()));
  return s.empty() || s.front() == ' ' || s.front() == '\t' || s.front() == '\r';
}

struct Triplet {
  index_t row;
  index_t col;
  double value;
};

CsrMatrix triplets_to_csr(std::size_t rows, std::size_t cols, std::vector<Triplet>& t) {
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.nr_rows = rows;
  m.nr_cols = cols;
  m.row_ptr.assign(rows + 1, 0);
  m.col_idx.reserve(t.size());
  m.values.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!m.col_idx.empty() && i > 0 && t[i].row == t[i - 1].row && t[i].col == t[i - 1].col) {
      m.values.back() += t[i].value;
      continue;
    }
    m.col_idx.push_back(t[i].col);
    m.values.push_back(t[i].value);
    ++m.row_ptr[t[i].row + 1];
  }
  std::partial_sum(m.row_ptr.begin(), m.row_ptr.end(), m.row_ptr.begin());
  return m;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t decode_le(const unsigned char* b, int n) {
  std::uint64_t v = 0;
  for (int i = n - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

template <typename T>
void write_array(std::ostream& out, const std::vector<T>& v) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
  } else {
    for (const T& x : v) {
      unsigned char b[sizeof(T)];
      std::memcpy(b, &x, sizeof(T));
      std::reverse(b, b + sizeof(T));
      out.write(reinterpret_cast<const char*>(b), sizeof(T));
    }
  }
}

template <typename T>
void read_array(std::istream& in, std::vector<T>& v, std::size_t n, const std::string& path) {
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
  if (static_cast<std::size_t>(in.gcount()) != n * sizeof(T)) {
    throw Error(ErrorKind::io_error, path + " is truncated");
  }
  if constexpr (std::endian::native != std::endian::little) {
    for (T& x : v) {
      unsigned char b[sizeof(T)];
      std::memcpy(b, &x, sizeof(T));
      std::reverse(b, b + sizeof(T));
      std::memcpy(&x, b, sizeof(T));
    }
  }
}

}  // namespace

CsrMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw Error(ErrorKind::parse_error, "line 1: empty file");
  ++lineno;

  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") parse_fail(lineno, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw Error(ErrorKind::unsupported_field, "object '" + object + "'");
  if (format != "coordinate") throw Error(ErrorKind::unsupported_field, "format '" + format + "'");

  MmField fld;
  if (field == "real" || field == "double") fld = MmField::real;
  else if (field == "integer") fld = MmField::integer;
  else if (field == "pattern") fld = MmField::pattern;
  else throw Error(ErrorKind::unsupported_field, "field '" + field + "'");

  MmSymmetry sym;
  if (symmetry == "general") sym = MmSymmetry::general;
  else if (symmetry == "symmetric") sym = MmSymmetry::symmetric;
  else if (symmetry == "skew-symmetric") sym = MmSymmetry::skew_symmetric;
  else throw Error(ErrorKind::unsupported_field, "symmetry '" + symmetry + "'");

  // Size line: first non-comment, non-blank line.
  std::size_t rows = 0, cols = 0, entries = 0;
  for (;;) {
    if (!std::getline(in, line)) parse_fail(lineno + 1, "missing size line");
    ++lineno;
    std::string_view s = skip_ws(line);
    if (s.empty() || s.front() == '%') continue;
    if (!next_number(s, rows) || !next_number(s, cols) || !next_number(s, entries) || !skip_ws(s).empty()) {
      parse_fail(lineno, "expected 'rows cols entries'");
    }
    break;
  }
  constexpr std::size_t kMaxIndex = std::numeric_limits<index_t>::max();
  if (rows > kMaxIndex || cols > kMaxIndex) {
    throw Error(ErrorKind::capacity_exceeded, "dimensions exceed 32-bit indices");
  }

  std::vector<Triplet> t;
  t.reserve(sym == MmSymmetry::general ? entries : 2 * entries);
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = skip_ws(line);
    if (s.empty() || s.front() == '%') continue;
    if (seen == entries) parse_fail(lineno, "more entries than declared");
    std::size_t i = 0, j = 0;
    double v = 1.0;
    if (!next_number(s, i) || !next_number(s, j)) parse_fail(lineno, "bad index pair");
    if (fld == MmField::real) {
      if (!next_number(s, v)) parse_fail(lineno, "bad value");
    } else if (fld == MmField::integer) {
      long long iv = 0;
      if (!next_number(s, iv)) parse_fail(lineno, "bad integer value");
      v = static_cast<double>(iv);
    }
    if (!skip_ws(s).empty()) parse_fail(lineno, "trailing characters");
    if (i < 1 || i > rows || j < 1 || j > cols) parse_fail(lineno, "index out of range");
    const auto r = static_cast<index_t>(i - 1);
    const auto c = static_cast<index_t>(j - 1);
    if (sym == MmSymmetry::skew_symmetric && r == c) parse_fail(lineno, "diagonal entry in skew-symmetric file");
    t.push_back({r, c, v});
    if (sym != MmSymmetry::general && r != c) {
      t.push_back({c, r, sym == MmSymmetry::skew_symmetric ? -v : v});
    }
    ++seen;
  }
  if (seen != entries) {
    parse_fail(lineno, "expected " + std::to_string(entries) + " entries, found " + std::to_string(seen));
  }
  if (t.size() > kMaxIndex) throw Error(ErrorKind::capacity_exceeded, "nnz exceeds 32-bit row pointers");
  return triplets_to_csr(rows, cols, t);
}

CsrMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path);
  try {
    return read_matrix_market(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + std::string(e.what()).substr(to_string(e.kind()).size() + 2));
  }
}

void write_matrix_market(const CsrMatrix& m, const std::string& path) {
  require_valid_csr(m);
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path);
  out << "%%MatrixMarket matrix coordinate real general\n"
      << m.nr_rows << ' ' << m.nr_cols << ' ' << m.nnz() << '\n';
  char buf[64];
  for (std::size_t r = 0; r < m.nr_rows; ++r) {
    for (index_t j = m.row_ptr[r]; j < m.row_ptr[r + 1]; ++j) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), m.values[j]);
      out << r + 1 << ' ' << m.col_idx[j] + 1 << ' ';
      out.write(buf, res.ptr - buf);
      out << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::io_error, "write failed for " + path);
}

void write_binary_cache(const CsrMatrix& m, const std::string& path) {
  require_valid_csr(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path);
  out.write("SPMB", 4);
  write_u32(out, kSpmbVersion);
  write_u64(out, m.nr_rows);
  write_u64(out, m.nr_cols);
  write_u64(out, m.nnz());
  write_array(out, m.row_ptr);
  write_array(out, m.col_idx);
  write_array(out, m.values);
  if (!out) throw Error(ErrorKind::io_error, "write failed for " + path);
}

CsrMatrix read_binary_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path);
  unsigned char header[32];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (in.gcount() < 8) throw Error(ErrorKind::io_error, path + " is truncated");
  if (std::memcmp(header, "SPMB", 4) != 0) throw Error(ErrorKind::io_error, path + " is not an SPMB file");
  const auto version = static_cast<std::uint32_t>(decode_le(header + 4, 4));
  if (version != kSpmbVersion) {
    throw Error(ErrorKind::version_mismatch,
                path + " has version " + std::to_string(version) + ", expected " + std::to_string(kSpmbVersion));
  }
  if (in.gcount() != static_cast<std::streamsize>(sizeof(header))) {
    throw Error(ErrorKind::io_error, path + " is truncated");
  }
  const std::uint64_t rows = decode_le(header + 8, 8);
  const std::uint64_t cols = decode_le(header + 16, 8);
  const std::uint64_t nnz = decode_le(header + 24, 8);
  constexpr std::uint64_t kMax = std::numeric_limits<index_t>::max();
  if (rows > kMax || cols > kMax || nnz > kMax) {
    throw Error(ErrorKind::io_error, path + " has an implausible header");
  }
  // Check the size up front so a truncated file never allocates huge arrays.
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::uint64_t>(in.tellg());
  const std::uint64_t expected = 32 + 4 * (rows + 1) + 4 * nnz + 8 * nnz;
  if (file_size < expected) throw Error(ErrorKind::io_error, path + " is truncated");
  if (file_size > expected) throw Error(ErrorKind::io_error, path + " has trailing bytes");
  in.seekg(32);

  CsrMatrix m;
  m.nr_rows = rows;
  m.nr_cols = cols;
  read_array(in, m.row_ptr, rows + 1, path);
  read_array(in, m.col_idx, nnz, path);
  read_array(in, m.values, nnz, path);
  if (auto v = validate_csr(m)) throw Error(ErrorKind::io_error, path + ": " + v->message());
  return m;
}

CsrMatrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::memcmp(magic, "SPMB", 4) == 0) return read_binary_cache(path);
  return read_matrix_market(path);
}

void save_matrix(const CsrMatrix& m, const std::string& path) {
  const bool mtx = path.size() >= 4 && lower(path.substr(path.size() - 4)) == ".mtx";
  if (mtx) write_matrix_market(m, path);
  else write_binary_cache(m, path);
}

}  // namespace spmvprobe
