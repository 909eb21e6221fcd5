#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hypernp/engines/embedding.hpp"
#include "hypernp/io/dataset.hpp"

namespace hypernp {

/// One training projection P(D', h): the subset rows and their 2D targets.
struct ProjectionRecord {
  HyperValue hyperparameter;
  std::vector<std::uint32_t> indices;  ///< rows of the source dataset
  Matrix<float> coords;                ///< indices.size() x 2

  friend bool operator==(const ProjectionRecord&, const ProjectionRecord&) = default;
};

/// Interchange format for training projections, whether produced here or by
/// an external tool (e.g. UMAP).
///
/// Layout (little-endian):
///   "HNPT" | u8 version | str fingerprint | str engine | u32 names, str...
///   | u64 seed | u8 aligned | u32 records
///   record: u32 h_dims, f64 h... | u32 count, u32 index... | f32 x,y per row
/// where str is u32 length + bytes.
struct ProjectionArchive {
  static constexpr std::uint8_t kVersion = 1;

  std::string dataset_fingerprint;
  std::string engine;
  std::vector<std::string> hyperparameter_names;
  std::uint64_t seed = 0;
  bool aligned = false;
  std::vector<ProjectionRecord> records;

  /// Shared index list, consistent shapes, ascending h for scalar archives.
  void validate() const;
  /// Rejects archives built from a different dataset unless `allow_mismatch`.
  void check_dataset(const Dataset& dataset, bool allow_mismatch = false) const;

  friend bool operator==(const ProjectionArchive&, const ProjectionArchive&) = default;
};

std::string encode_archive(const ProjectionArchive& archive);
ProjectionArchive decode_archive(std::string_view bytes, const std::string& context = "archive");
void write_archive(const std::filesystem::path& path, const ProjectionArchive& archive);
ProjectionArchive read_archive(const std::filesystem::path& path);

}  // namespace hypernp
