#include "eqtime/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "eqtime/rng.hpp"

namespace eqtime {

std::string format_full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : n_cols_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ += ',';
    out_ += header[i];
  }
  out_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != n_cols_)
    throw std::invalid_argument("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ += ',';
    out_ += format_full(values[i]);
  }
  out_ += '\n';
}

void CsvWriter::raw_row(const std::vector<std::string>& fields) {
  if (fields.size() != n_cols_)
    throw std::invalid_argument("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ += ',';
    out_ += fields[i];
  }
  out_ += '\n';
}

Manifest::Manifest(Json config_echo, std::uint64_t seed,
                   std::vector<std::string> formats)
    : config_(std::move(config_echo)),
      seed_(seed),
      formats_(std::move(formats)),
      extra_(Json::object()) {}

void Manifest::record_file(const std::filesystem::path& out_dir,
                           const std::string& rel_path,
                           const std::string& content) {
  const auto dot = rel_path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : rel_path.substr(dot + 1);
  bool selected = false;
  for (const auto& f : formats_) selected = selected || f == ext;
  if (!selected) return;
  atomic_write(out_dir / rel_path, content);
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(content)));
  files_.push_back({rel_path, content.size(), hex});
}

void Manifest::record_stage(const std::string& name, double seconds) {
  stages_.emplace_back(name, seconds);
}

void Manifest::set(const std::string& key, const Json& value) {
  extra_[key] = value;
}

Json Manifest::to_json() const {
  Json j;
  j["tool"] = kToolVersion;
  j["rng"] = kRngAlgorithm;
  j["seed"] = seed_;
  j["config"] = config_;
  Json stages = Json::array();
  for (const auto& [name, sec] : stages_)
    stages.push_back({{"stage", name}, {"seconds", sec}});
  j["wall_clock"] = stages;
  Json files = Json::array();
  for (const auto& f : files_)
    files.push_back(
        {{"path", f.path}, {"bytes", f.bytes}, {"fnv1a64", f.fnv1a64_hex}});
  j["files"] = files;
  for (auto it = extra_.begin(); it != extra_.end(); ++it) j[it.key()] = it.value();
  return j;
}

void Manifest::write(const std::filesystem::path& out_dir) const {
  atomic_write(out_dir / "manifest.json", to_json().dump(2) + "\n");
}

}  // namespace eqtime
