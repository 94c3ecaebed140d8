#include "mendel/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "mendel/error.hpp"
#include "mendel/keyvalue.hpp"

namespace mendel {
namespace fs = std::filesystem;
using nlohmann::json;

std::string csv_row(double t, const State& n) {
    std::string out = format_double(t);
    for (const double x : n) {
        out += ',';
        out += format_double(x);
    }
    return out;
}

namespace {

void dump_into(const json& j, int indent, int depth, std::string& out) {
    const bool pretty = indent >= 0;
    auto newline = [&](int d) {
        if (!pretty) return;
        out += '\n';
        out.append(static_cast<std::size_t>(d * indent), ' ');
    };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += json(key).dump();
                out += pretty ? ": " : ":";
                dump_into(value, indent, depth + 1, out);
            }
            newline(depth);
            out += '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& value : j) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                dump_into(value, indent, depth + 1, out);
            }
            newline(depth);
            out += ']';
            return;
        }
        case json::value_t::number_float: {
            const double x = j.get<double>();
            out += std::isfinite(x) ? format_double(x) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

std::string dump_json(const json& j, int indent) {
    std::string out;
    dump_into(j, indent, 0, out);
    return out;
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
        throw IoError("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("cannot read " + path.string());
    return sha256_hex(content);
}

fs::path output_root() {
    const char* env = std::getenv("MENDEL_OUTPUT_ROOT");
    if (env != nullptr && *env != '\0') return fs::path(env);
    return fs::path("mendel-output");
}

namespace {

fs::path with_parent(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    }
    return path;
}

}  // namespace

CsvTrajectoryWriter::CsvTrajectoryWriter(const fs::path& path) : path_(path), out_(with_parent(path)) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    out_ << kCsvHeader << '\n';
}

void CsvTrajectoryWriter::row(double t, const State& n) {
    out_ << csv_row(t, n) << '\n';
    ++rows_;
}

void CsvTrajectoryWriter::close() {
    out_.flush();
    const bool ok = static_cast<bool>(out_);
    out_.close();
    if (!ok) throw IoError("write failed for " + path_.string());
}

OutputDir::OutputDir(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    if (fs::exists(dir_ / "manifest.json"))
        throw IoError("output directory " + dir_.string() + " already holds a completed run");
}

void OutputDir::write_text(const std::string& relative, std::string_view content) {
    if (sealed_) throw IoError("output directory already sealed by its manifest");
    const fs::path target = with_parent(dir_ / relative);
    std::ofstream out(target, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + target.string());
    add(relative);
}

void OutputDir::write_json(const std::string& relative, const json& j) {
    write_text(relative, dump_json(j) + "\n");
}

void OutputDir::add(const std::string& relative) {
    if (sealed_) throw IoError("output directory already sealed by its manifest");
    for (const auto& f : files_)
        if (f == relative) return;
    files_.push_back(relative);
}

void OutputDir::write_manifest(json meta) {
    if (sealed_) throw IoError("manifest already written");
    json list = json::array();
    for (const auto& relative : files_) {
        const fs::path p = dir_ / relative;
        std::error_code ec;
        const auto bytes = fs::file_size(p, ec);
        if (ec) throw IoError("cannot stat " + p.string());
        list.push_back({{"path", relative}, {"bytes", bytes}, {"sha256", sha256_file(p)}});
    }
    meta["files"] = std::move(list);

    const fs::path tmp = dir_ / "manifest.json.tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << dump_json(meta) << '\n';
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, dir_ / "manifest.json", ec);
    if (ec) throw IoError("cannot finalise manifest: " + ec.message());
    sealed_ = true;
}

}  // namespace mendel
