#pragma once

// Field serialization.
//
// Binary record (all integers little-endian uint32, floats IEEE-754 binary64
// little-endian):
//
//   offset 0   magic "WGLF"
//   offset 4   format version (1)
//   offset 8   d
//   offset 12  K
//   offset 16  mode order tag (0 = lexicographic on v_1..v_d)
//   offset 20  (2K+1)^d pairs (re, im) in lattice order
//
// A snapshot stream is a sequence of (binary64 t, field record) pairs.
//
// CSV form: header "v1,...,vd,re,im", one row per mode in lattice order,
// floats printed with 17 significant digits.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wickgl/lattice.hpp"

namespace wickgl {

inline constexpr std::uint32_t kFieldFormatVersion = 1;
inline constexpr std::uint32_t kModeOrderLexicographic = 0;

void write_field_binary(std::ostream& out, const SpectralField& field);
/// Throws DomainError on a malformed or truncated record.
SpectralField read_field_binary(std::istream& in);

void write_field_csv(std::ostream& out, const SpectralField& field);
SpectralField read_field_csv(std::istream& in);

struct Snapshot {
  double t;
  SpectralField field;
};

void write_snapshot(std::ostream& out, double t, const SpectralField& field);
/// Reads snapshots until end of stream.
std::vector<Snapshot> read_snapshot_stream(std::istream& in);

}  // namespace wickgl
