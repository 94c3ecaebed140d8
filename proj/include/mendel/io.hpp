#pragma once

// Persistence: trajectory CSV, JSON at full precision, content hashes and the
// per-run output directory whose manifest is written last.

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mendel/rates.hpp"

namespace mendel {

inline constexpr std::string_view kCsvHeader = "t,aa,aA,AA,aB,AB,BB";

/// "t,n_aa,...,n_BB" with every value at 17 significant digits, no newline.
std::string csv_row(double t, const State& n);

/// Serialises like json::dump, except that floating-point numbers are printed
/// with 17 significant digits and non-finite values become null.
std::string dump_json(const nlohmann::json& j, int indent = 2);

std::string sha256_hex(std::string_view bytes);
/// Throws IoError if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

/// MENDEL_OUTPUT_ROOT when set and nonempty, otherwise ./mendel-output.
std::filesystem::path output_root();

/// Streaming trajectory writer; the header goes out on construction.
class CsvTrajectoryWriter {
public:
    explicit CsvTrajectoryWriter(const std::filesystem::path& path);
    void row(double t, const State& n);
    /// Flushes and closes; throws IoError if any write failed.
    void close();
    std::size_t rows() const noexcept { return rows_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t rows_ = 0;
};

/// One run's output directory. Every file written through it is recorded and
/// hashed into manifest.json, which is written last via an atomic rename.
class OutputDir {
public:
    /// Creates the directory (and parents). Throws IoError on failure or if it
    /// already holds a manifest from a previous run.
    explicit OutputDir(std::filesystem::path dir);

    const std::filesystem::path& path() const noexcept { return dir_; }
    std::filesystem::path file(const std::string& relative) const { return dir_ / relative; }

    void write_text(const std::string& relative, std::string_view content);
    void write_json(const std::string& relative, const nlohmann::json& j);
    /// Registers a file produced by other means (e.g. a CsvTrajectoryWriter).
    void add(const std::string& relative);

    const std::vector<std::string>& files() const noexcept { return files_; }

    /// `meta` gains a "files" array of {path, bytes, sha256}. No further
    /// writes are allowed afterwards.
    void write_manifest(nlohmann::json meta);

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
    bool sealed_ = false;
};

}  // namespace mendel
