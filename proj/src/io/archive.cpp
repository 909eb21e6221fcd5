#include "hypernp/io/archive.hpp"

#include <fstream>
#include <iterator>

#include "hypernp/io/binary.hpp"

namespace hypernp {

namespace binary {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::io, "error reading " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::io, "error writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::io, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace binary

void ProjectionArchive::validate() const {
  if (records.empty()) return;
  const auto& first = records.front();
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.hyperparameter.size() != hyperparameter_names.size()) {
      fail(ErrorKind::format, "record " + std::to_string(r) + " has " + std::to_string(rec.hyperparameter.size()) +
                                  " hyperparameter values for " + std::to_string(hyperparameter_names.size()) +
                                  " names");
    }
    if (rec.indices != first.indices) {
      fail(ErrorKind::format, "record " + std::to_string(r) + " uses a different subset index list");
    }
    if (rec.coords.rows() != rec.indices.size() || rec.coords.cols() != 2) {
      fail(ErrorKind::format, "record " + std::to_string(r) + " coordinates do not match its index list");
    }
    if (hyperparameter_names.size() == 1 && r > 0 &&
        !(records[r - 1].hyperparameter[0] < rec.hyperparameter[0])) {
      fail(ErrorKind::format, "records are not sorted by ascending hyperparameter (record " +
                                  std::to_string(r) + ")");
    }
  }
}

void ProjectionArchive::check_dataset(const Dataset& dataset, bool allow_mismatch) const {
  if (!allow_mismatch && dataset_fingerprint != dataset.fingerprint) {
    fail(ErrorKind::invalid_argument, "archive fingerprint " + dataset_fingerprint +
                                          " does not match dataset fingerprint " + dataset.fingerprint);
  }
  for (const auto& rec : records) {
    for (const auto idx : rec.indices) {
      if (idx >= dataset.size()) {
        fail(ErrorKind::invalid_argument, "archive index " + std::to_string(idx) + " exceeds dataset size " +
                                              std::to_string(dataset.size()));
      }
    }
  }
}

std::string encode_archive(const ProjectionArchive& archive) {
  archive.validate();
  binary::Writer w;
  w.raw("HNPT");
  w.u8(ProjectionArchive::kVersion);
  w.str(archive.dataset_fingerprint);
  w.str(archive.engine);
  w.u32(static_cast<std::uint32_t>(archive.hyperparameter_names.size()));
  for (const auto& name : archive.hyperparameter_names) w.str(name);
  w.u64(archive.seed);
  w.u8(archive.aligned ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(archive.records.size()));
  for (const auto& rec : archive.records) {
    w.u32(static_cast<std::uint32_t>(rec.hyperparameter.size()));
    for (double h : rec.hyperparameter) w.f64(h);
    w.u32(static_cast<std::uint32_t>(rec.indices.size()));
    for (auto idx : rec.indices) w.u32(idx);
    for (float v : rec.coords.values()) w.f32(v);
  }
  return w.take();
}

ProjectionArchive decode_archive(std::string_view bytes, const std::string& context) {
  binary::Reader r(bytes, context);
  if (r.raw(4) != "HNPT") fail(ErrorKind::format, context + ": not a projection archive (bad magic)");
  const auto version = r.u8();
  if (version != ProjectionArchive::kVersion) {
    fail(ErrorKind::format, context + ": unsupported archive version " + std::to_string(version));
  }
  ProjectionArchive a;
  a.dataset_fingerprint = r.str();
  a.engine = r.str();
  const auto names = r.u32();
  for (std::uint32_t i = 0; i < names; ++i) a.hyperparameter_names.push_back(r.str());
  a.seed = r.u64();
  a.aligned = r.u8() != 0;
  const auto count = r.u32();
  for (std::uint32_t k = 0; k < count; ++k) {
    ProjectionRecord rec;
    const auto dims = r.u32();
    if (dims > r.remaining() / 8) fail(ErrorKind::format, context + ": corrupt hyperparameter count");
    for (std::uint32_t i = 0; i < dims; ++i) rec.hyperparameter.push_back(r.f64());
    const auto rows = r.u32();
    if (rows > r.remaining() / 4) fail(ErrorKind::format, context + ": corrupt index count");
    rec.indices.resize(rows);
    for (auto& idx : rec.indices) idx = r.u32();
    rec.coords = Matrix<float>(rows, 2);
    for (auto& v : rec.coords.values()) v = r.f32();
    a.records.push_back(std::move(rec));
  }
  if (r.remaining() != 0) fail(ErrorKind::format, context + ": trailing bytes after last record");
  a.validate();
  return a;
}

void write_archive(const std::filesystem::path& path, const ProjectionArchive& archive) {
  binary::write_file(path, encode_archive(archive));
}

ProjectionArchive read_archive(const std::filesystem::path& path) {
  return decode_archive(binary::read_file(path), path.string());
}

}  // namespace hypernp
