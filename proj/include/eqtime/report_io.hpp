#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace eqtime {

using Json = nlohmann::json;

/// Serialize a double with 17 significant digits (bit-exact round trip).
std::string format_full(double x);

/// Write content to path atomically (write to <path>.tmp, then rename).
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// FNV-1a 64-bit checksum of a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

struct CsvWriter {
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& fields);
  std::string str() const { return out_; }

 private:
  std::string out_;
  std::size_t n_cols_ = 0;
};

struct FileRecord {
  std::string path;  // relative to the output dir
  std::uint64_t bytes = 0;
  std::string fnv1a64_hex;
};

/// Collects written files and timing for the run manifest. Data files whose
/// extension is not in `formats` are skipped (manifest.json always written).
class Manifest {
 public:
  Manifest(Json config_echo, std::uint64_t seed,
           std::vector<std::string> formats = {"csv", "json"});
  void record_file(const std::filesystem::path& out_dir,
                   const std::string& rel_path, const std::string& content);
  void record_stage(const std::string& name, double seconds);
  void set(const std::string& key, const Json& value);
  Json to_json() const;
  void write(const std::filesystem::path& out_dir) const;

 private:
  Json config_;
  std::uint64_t seed_ = 0;
  std::vector<std::string> formats_;
  std::vector<FileRecord> files_;
  std::vector<std::pair<std::string, double>> stages_;
  Json extra_;
};

inline constexpr const char* kToolVersion = "eqtime 1.0.0";

}  // namespace eqtime
