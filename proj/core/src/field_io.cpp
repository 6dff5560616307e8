#include "wickgl/field_io.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "wickgl/error.hpp"

namespace wickgl {

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <typename T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::little) {
    return value;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(b[i], b[sizeof(T) - 1 - i]);
    }
    std::memcpy(&value, b, sizeof(T));
    return value;
  }
}

template <typename T>
void put(std::ostream& out, T value) {
  value = to_little(value);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& value) {
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) return false;
  value = to_little(value);
  return true;
}

constexpr char kMagic[4] = {'W', 'G', 'L', 'F'};

}  // namespace

void write_field_binary(std::ostream& out, const SpectralField& field) {
  const ModeLattice& lat = field.lattice();
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kFieldFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(lat.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(lat.cutoff()));
  put<std::uint32_t>(out, kModeOrderLexicographic);
  for (const Complex& c : field.coefficients()) {
    put<double>(out, c.real());
    put<double>(out, c.imag());
  }
  if (!out) throw DomainError("failed to write field record");
}

SpectralField read_field_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw DomainError("not a field record (bad magic)");
  }
  std::uint32_t version = 0, d = 0, k = 0, order = 0;
  if (!get(in, version) || !get(in, d) || !get(in, k) || !get(in, order)) {
    throw DomainError("truncated field header");
  }
  if (version != kFieldFormatVersion) {
    throw DomainError("unsupported field format version " +
                      std::to_string(version));
  }
  if (order != kModeOrderLexicographic) {
    throw DomainError("unsupported mode order tag " + std::to_string(order));
  }
  const ModeLattice lat(static_cast<int>(d), static_cast<int>(k));
  std::vector<Complex> coeffs(lat.size());
  for (auto& c : coeffs) {
    double re = 0.0, im = 0.0;
    if (!get(in, re) || !get(in, im)) {
      throw DomainError("truncated field record");
    }
    c = Complex(re, im);
  }
  return SpectralField::from_coefficients(lat, std::move(coeffs));
}

void write_field_csv(std::ostream& out, const SpectralField& field) {
  const ModeLattice& lat = field.lattice();
  for (int j = 0; j < lat.dim(); ++j) out << 'v' << (j + 1) << ',';
  out << "re,im\n";
  char buf[64];
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const Mode v = lat.mode(i);
    for (int j = 0; j < lat.dim(); ++j) out << v[j] << ',';
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", field[i].real(),
                  field[i].imag());
    out << buf;
  }
}

SpectralField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty field CSV");
  int d = 0;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) {
      if (!col.empty() && col[0] == 'v') ++d;
    }
  }
  if (d < 1) throw DomainError("field CSV header has no mode columns");
  std::vector<std::pair<Mode, Complex>> rows;
  int kmax = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Mode v{};
    double re = 0.0, im = 0.0;
    try {
      for (int j = 0; j < d; ++j) {
        std::getline(ss, cell, ',');
        v[j] = std::stoi(cell);
        kmax = std::max(kmax, std::abs(v[j]));
      }
      std::getline(ss, cell, ',');
      re = std::stod(cell);
      std::getline(ss, cell, ',');
      im = std::stod(cell);
    } catch (const std::exception&) {
      throw DomainError("malformed field CSV row at line " +
                        std::to_string(lineno));
    }
    rows.emplace_back(v, Complex(re, im));
  }
  const ModeLattice lat(d, std::max(kmax, 1));
  if (rows.size() != lat.size()) {
    throw DomainError("field CSV does not cover a full lattice box");
  }
  std::vector<Complex> coeffs(lat.size());
  for (const auto& [v, c] : rows) coeffs[lat.index_of(v)] = c;
  return SpectralField::from_coefficients(lat, std::move(coeffs));
}

void write_snapshot(std::ostream& out, double t, const SpectralField& field) {
  put<double>(out, t);
  write_field_binary(out, field);
}

std::vector<Snapshot> read_snapshot_stream(std::istream& in) {
  std::vector<Snapshot> out;
  double t = 0.0;
  while (get(in, t)) {
    out.push_back(Snapshot{t, read_field_binary(in)});
  }
  return out;
}

}  // namespace wickgl
