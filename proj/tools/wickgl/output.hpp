#pragma once

// Output plumbing for the wickgl tool: JSON with 17-digit floats, CSV rows,
// SHA-256 digests and the per-run manifest.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace wickgl::cli {

using Json = nlohmann::ordered_json;

/// Versioned schema tags, one per record kind.
namespace schema {
inline constexpr const char* kLattice = "wickgl.lattice/1";
inline constexpr const char* kWickExpect = "wickgl.wick-expect/1";
inline constexpr const char* kCorrelation = "wickgl.correlation/1";
inline constexpr const char* kRegime = "wickgl.regime/1";
inline constexpr const char* kScan = "wickgl.diverge-scan/1";
inline constexpr const char* kBounds = "wickgl.check-bounds/1";
inline constexpr const char* kTimeIntegral = "wickgl.time-integral/1";
inline constexpr const char* kGl = "wickgl.solve-gl/1";
inline constexpr const char* kGlTrace = "wickgl.gl-trace/1";
inline constexpr const char* kEnsemble = "wickgl.ensemble/1";
inline constexpr const char* kManifest = "wickgl.manifest/1";
}  // namespace schema

/// %.17g; non-finite values are not representable in JSON and become null
/// there (CSV keeps inf/nan).
std::string format_double(double x);

/// Compact JSON with every float printed to 17 significant digits.
std::string dump(const Json& value);

/// Null for non-finite values.
Json number(double x);

std::string sha256_file(const std::filesystem::path& path);

/// One run of one subcommand.  Outputs are only written when an output
/// directory was requested; the manifest then lists their digests.
class RunContext {
 public:
  RunContext(std::string command, std::string parameters, std::string out_dir);

  bool writes_files() const noexcept { return !out_dir_.empty(); }
  /// Path for an output file, registered for the manifest.
  std::filesystem::path output(const std::string& name);
  void set_seed(std::uint64_t seed) {
    seed_ = seed;
    has_seed_ = true;
  }
  /// Writes run.ini (replayable parameters) and manifest.json.
  void finish();

 private:
  std::string command_;
  std::string parameters_;
  std::filesystem::path out_dir_;
  std::vector<std::filesystem::path> outputs_;
  std::uint64_t seed_ = 0;
  bool has_seed_ = false;
  std::chrono::system_clock::time_point start_;
};

}  // namespace wickgl::cli
