#include "mhmp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mhmp::io {

json matrix_to_json(const CMatrix& a) {
  json rows = json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < a.cols(); ++j) row.push_back({a(i, j).real(), a(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::ParseError, "matrix must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j[0].size();
  CMatrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != cols) {
      throw Error(ErrorKind::ParseError, "matrix rows must have equal length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const json& e = row[c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw Error(ErrorKind::ParseError, "matrix entries must be [re, im] pairs");
      }
      out(i, c) = cplx{e[0].get<double>(), e[1].get<double>()};
    }
  }
  return out;
}

json problem_to_json(const MomentProblem& p) {
  json s = json::array();
  for (const auto& b : p.s) s.push_back(matrix_to_json(b));
  return json{{"m", p.m}, {"n", p.n}, {"s", std::move(s)}};
}

MomentProblem problem_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "problem must be an object");
  for (const char* key : {"m", "n", "s"})
    if (!j.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing field ") + key);
  if (!j["m"].is_number_unsigned() || !j["n"].is_number_unsigned() || !j["s"].is_array()) {
    throw Error(ErrorKind::ParseError, "m, n must be nonnegative integers and s an array");
  }
  MomentProblem p;
  p.m = j["m"].get<std::size_t>();
  p.n = j["n"].get<std::size_t>();
  for (const auto& b : j["s"]) p.s.push_back(matrix_from_json(b));
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  return p;
}

json measure_to_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms)
    atoms.push_back(json{{"lambda", a.lambda}, {"weight", matrix_to_json(a.weight)}});
  return atoms;
}

AtomicMeasure measure_from_json(const json& j, std::size_t m) {
  if (!j.is_array()) throw Error(ErrorKind::ParseError, "measure must be an array of atoms");
  AtomicMeasure mu;
  mu.m = m;
  for (const auto& a : j) {
    if (!a.is_object() || !a.contains("lambda") || !a.contains("weight") ||
        !a["lambda"].is_number()) {
      throw Error(ErrorKind::ParseError, "atom must have numeric lambda and a weight");
    }
    CMatrix w = matrix_from_json(a["weight"]);
    if (w.rows() != m || w.cols() != m) throw Error(ErrorKind::ParseError, "atom weight size");
    if (!is_hermitian(w)) throw Error(ErrorKind::ParseError, "atom weight is not Hermitian");
    mu.atoms.push_back({a["lambda"].get<double>(), std::move(w)});
  }
  return mu;
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_digest(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + path);
  out << contents;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

}  // namespace mhmp::io
