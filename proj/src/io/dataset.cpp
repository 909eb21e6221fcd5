#include "hypernp/io/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace hypernp {

void Dataset::validate() const {
  if (features.rows() < 2) fail(ErrorKind::invalid_argument, "dataset needs at least 2 samples");
  if (features.cols() < 1) fail(ErrorKind::invalid_argument, "dataset needs at least 1 feature");
  if (!labels.empty() && labels.size() != features.rows()) {
    fail(ErrorKind::dimension_mismatch, "label count does not match sample count");
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!std::isfinite(features.data()[i])) {
      fail(ErrorKind::invalid_argument, "non-finite feature at row " + std::to_string(i / features.cols()) +
                                            ", column " + std::to_string(i % features.cols()));
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = select_rows(features, rows);
  if (!labels.empty()) {
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) out.labels.push_back(labels.at(r));
  }
  out.feature_names = feature_names;
  Fingerprint fp;
  fp.update(fingerprint);
  fp.update_values(rows);
  out.fingerprint = fp.hex();
  return out;
}

std::string content_fingerprint(const Matrix<double>& features, const std::vector<int>& labels) {
  Fingerprint fp;
  const std::uint64_t shape[2] = {features.rows(), features.cols()};
  fp.update_values(std::span<const std::uint64_t>(shape));
  fp.update_values(std::span<const double>(features.values()));
  fp.update_values(std::span<const int>(labels));
  return fp.hex();
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::io, "error reading " + path.string());
  return bytes;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

Dataset load_delimited(const std::filesystem::path& path, const DelimitedOptions& options) {
  const std::string bytes = read_file(path);
  Dataset out;
  out.fingerprint = [&] {
    Fingerprint fp;
    fp.update(bytes);
    return fp.hex();
  }();

  std::vector<double> values;
  std::size_t columns = 0, rows = 0, line_no = 0;
  bool header_pending = options.header;
  std::string_view rest(bytes);
  while (!rest.empty()) {
    const std::size_t eol = rest.find('\n');
    const std::string_view line = trim(rest.substr(0, eol));
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, options.delimiter);
    if (columns == 0) {
      columns = fields.size();
      if (options.label_column && *options.label_column >= columns) {
        fail(ErrorKind::format, path.string() + ": label column " + std::to_string(*options.label_column) +
                                    " out of range for " + std::to_string(columns) + " columns");
      }
    } else if (fields.size() != columns) {
      fail(ErrorKind::format, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(columns) + " fields, found " + std::to_string(fields.size()));
    }
    if (header_pending) {
      header_pending = false;
      for (std::size_t c = 0; c < fields.size(); ++c) {
        if (!options.label_column || c != *options.label_column) out.feature_names.emplace_back(fields[c]);
      }
      continue;
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto field = fields[c];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
        fail(ErrorKind::format, path.string() + ": row " + std::to_string(line_no) + ", column " +
                                    std::to_string(c + 1) + ": invalid value '" + std::string(field) + "'");
      }
      if (options.label_column && c == *options.label_column) {
        if (v != std::floor(v)) {
          fail(ErrorKind::format, path.string() + ": row " + std::to_string(line_no) + ": label '" +
                                      std::string(field) + "' is not an integer");
        }
        out.labels.push_back(static_cast<int>(v));
      } else {
        values.push_back(v);
      }
    }
    ++rows;
  }
  if (rows == 0) fail(ErrorKind::format, path.string() + ": no data rows");
  const std::size_t n_features = columns - (options.label_column ? 1 : 0);
  out.features = Matrix<double>(rows, n_features);
  out.features.values() = std::move(values);
  if (out.feature_names.empty()) {
    for (std::size_t c = 0; c < n_features; ++c) out.feature_names.push_back("x" + std::to_string(c));
  }
  out.validate();
  return out;
}

namespace {

std::uint32_t read_be32(const std::string& bytes, std::size_t offset, const std::filesystem::path& path) {
  if (offset + 4 > bytes.size()) fail(ErrorKind::format, path.string() + ": truncated IDX header");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

}  // namespace

Dataset load_idx_images(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                        std::size_t limit) {
  if (limit < 2) fail(ErrorKind::invalid_argument, "IDX limit must be at least 2 (a dataset needs N >= 2)");
  const std::string images = read_file(images_path);
  const std::uint32_t magic = read_be32(images, 0, images_path);
  if (magic != 0x00000803) {
    fail(ErrorKind::format, images_path.string() + ": bad IDX image magic 0x" + [&] {
      char buf[9];
      std::snprintf(buf, sizeof buf, "%08x", magic);
      return std::string(buf);
    }());
  }
  const std::size_t count = read_be32(images, 4, images_path);
  const std::size_t height = read_be32(images, 8, images_path);
  const std::size_t width = read_be32(images, 12, images_path);
  const std::size_t take = std::min(count, limit);
  const std::size_t pixels = height * width;
  if (pixels == 0) fail(ErrorKind::format, images_path.string() + ": zero-sized images");
  if (16 + take * pixels > images.size()) {
    fail(ErrorKind::format, images_path.string() + ": truncated payload (" + std::to_string(images.size()) +
                                " bytes for " + std::to_string(take) + " images)");
  }

  Dataset out;
  out.features = Matrix<double>(take, pixels);
  const auto* px = reinterpret_cast<const unsigned char*>(images.data() + 16);
  for (std::size_t i = 0; i < take * pixels; ++i) out.features.data()[i] = px[i] / 255.0;
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) out.feature_names.push_back("px" + std::to_string(r) + "_" + std::to_string(c));
  }

  Fingerprint fp;
  fp.update(std::string_view(images).substr(0, 16 + take * pixels));
  if (!labels_path.empty()) {
    const std::string labels = read_file(labels_path);
    if (read_be32(labels, 0, labels_path) != 0x00000801) {
      fail(ErrorKind::format, labels_path.string() + ": bad IDX label magic");
    }
    const std::size_t label_count = read_be32(labels, 4, labels_path);
    if (label_count < take || 8 + take > labels.size()) {
      fail(ErrorKind::format, labels_path.string() + ": truncated label payload");
    }
    const auto* lp = reinterpret_cast<const unsigned char*>(labels.data() + 8);
    out.labels.assign(lp, lp + take);
    fp.update(std::string_view(labels).substr(0, 8 + take));
  }
  out.fingerprint = fp.hex();
  out.validate();
  return out;
}

Dataset synth_blobs(std::size_t clusters, std::size_t points_per_cluster, std::size_t dims, double spread,
                    std::uint64_t seed) {
  if (clusters == 0 || points_per_cluster == 0 || dims == 0) {
    fail(ErrorKind::invalid_argument, "synth_blobs: clusters, points and dims must be positive");
  }
  if (!(spread >= 0.0)) fail(ErrorKind::invalid_argument, "synth_blobs: spread must be non-negative");
  Rng rng(seed);
  const double min_separation = 6.0 * spread;
  double box = 10.0 * std::max(spread, 1e-3) * std::max<double>(2.0, static_cast<double>(clusters));
  std::vector<std::vector<double>> centers;
  int attempts = 0;
  while (centers.size() < clusters) {
    std::vector<double> c(dims);
    for (auto& v : c) v = rng.uniform(-box, box);
    bool ok = true;
    for (const auto& other : centers) {
      double s = 0.0;
      for (std::size_t j = 0; j < dims; ++j) s += (c[j] - other[j]) * (c[j] - other[j]);
      if (std::sqrt(s) < min_separation) ok = false;
    }
    if (ok) {
      centers.push_back(std::move(c));
    } else if (++attempts % 1000 == 0) {
      box *= 1.5;
    }
  }

  Dataset out;
  out.features = Matrix<double>(clusters * points_per_cluster, dims);
  for (std::size_t k = 0; k < clusters; ++k) {
    for (std::size_t p = 0; p < points_per_cluster; ++p) {
      const std::size_t row = k * points_per_cluster + p;
      for (std::size_t j = 0; j < dims; ++j) out.features(row, j) = centers[k][j] + spread * rng.normal();
      out.labels.push_back(static_cast<int>(k));
    }
  }
  for (std::size_t j = 0; j < dims; ++j) out.feature_names.push_back("x" + std::to_string(j));
  out.fingerprint = content_fingerprint(out.features, out.labels);
  return out;
}

void standardize(Dataset& dataset) {
  auto& x = dataset.features;
  const double n = static_cast<double>(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, j);
    mean /= n;
    for (std::size_t i = 0; i < x.rows(); ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
    const double sd = std::sqrt(var / n);
    for (std::size_t i = 0; i < x.rows(); ++i) x(i, j) = sd > 0.0 ? (x(i, j) - mean) / sd : 0.0;
  }
  Fingerprint fp;
  fp.update(dataset.fingerprint);
  fp.update("zscore");
  dataset.fingerprint = fp.hex();
}

}  // namespace hypernp
