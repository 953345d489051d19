#include "spikedet/io.hpp"

#include <charconv>
#include <complex>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikedet {
namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("matrix file line " + std::to_string(line) + ": " + what);
}

bool read_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

// Accepts "a", "bi", "a+bi", "a-bi" (with exponents such as 1e-3+2e+1i).
bool read_complex(std::string_view s, std::complex<double>& out) {
  if (s.empty()) return false;
  if (s.back() != 'i') {
    double re = 0.0;
    if (!read_double(s, re)) return false;
    out = {re, 0.0};
    return true;
  }
  s.remove_suffix(1);
  std::size_t split = std::string_view::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  double re = 0.0, im = 0.0;
  if (split == std::string_view::npos) {
    if (!read_double(s, im)) return false;
  } else {
    if (!read_double(s.substr(0, split), re)) return false;
    std::string_view imag = s.substr(split);
    if (imag == "+" || imag == "-") {
      im = imag == "+" ? 1.0 : -1.0;
    } else if (!read_double(imag, im)) {
      return false;
    }
  }
  out = {re, im};
  return true;
}

std::string number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

}  // namespace

DataMatrix parse_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(1, "empty file");
  std::istringstream header(line);
  long long n = 0;
  std::string kind, extra;
  if (!(header >> n >> kind) || (header >> extra)) fail(1, "expected \"N real|complex\"");
  if (n < 1) fail(1, "N must be positive");
  if (kind != "real" && kind != "complex") fail(1, "kind must be real or complex");
  const bool cplx = kind == "complex";

  Eigen::MatrixXcd z(n, n);
  Eigen::MatrixXd r(n, n);
  for (long long i = 0; i < n; ++i) {
    const int lineno = static_cast<int>(i + 2);
    if (!std::getline(in, line)) fail(lineno, "missing row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream row(line);
    std::string tok;
    long long j = 0;
    for (; row >> tok; ++j) {
      if (j >= n) fail(lineno, "too many values");
      if (cplx) {
        std::complex<double> v;
        if (!read_complex(tok, v)) fail(lineno, "bad complex value '" + tok + "'");
        z(i, j) = v;
      } else {
        double v = 0.0;
        if (!read_double(tok, v)) fail(lineno, "bad value '" + tok + "'");
        r(i, j) = v;
      }
    }
    if (j != n) fail(lineno, "expected " + std::to_string(n) + " values");
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) fail(static_cast<int>(n + 2), "trailing data");
  }
  try {
    return cplx ? DataMatrix::hermitian(std::move(z)) : DataMatrix::real(std::move(r));
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("matrix file: ") + e.what());
  }
}

DataMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open matrix file " + path.string());
  return parse_matrix(in);
}

std::string format_matrix(const DataMatrix& m) {
  const Index n = m.n();
  std::string out = std::to_string(n) + (m.is_complex() ? " complex\n" : " real\n");
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j) out += ' ';
      if (m.is_complex()) {
        const std::complex<double> v = m.complex_entries()(i, j);
        out += number(v.real());
        const std::string im = number(v.imag());
        if (im.front() != '-') out += '+';
        out += im;
        out += 'i';
      } else {
        out += number(m.real_entries()(i, j));
      }
    }
    out += '\n';
  }
  return out;
}

void write_matrix(const DataMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << format_matrix(m);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace spikedet
