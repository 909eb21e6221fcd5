#pragma once

// Binary framing shared by the one-shot layout endpoint and the stream.
//
//   "HNPL" | u8 version | u8 type | u16 flags | u64 seq
//   layout (type 1):  u32 h_count | u32 points | f64 h[h_count] | f32 xy[2 * points] | i32 labels[points]?
//   error (type 2):   str class | str message
//   request (type 3): u32 h_count | f64 h[h_count]
//
// All integers and floats little-endian; str is u32 length + bytes. Flag bit 0
// marks the presence of labels in a layout frame.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypernp/engines/embedding.hpp"

namespace hypernp::protocol {

inline constexpr std::string_view kMagic = "HNPL";
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::uint16_t kFlagLabels = 1;

enum class FrameType : std::uint8_t { layout = 1, error = 2, request = 3 };

struct Frame {
  FrameType type = FrameType::layout;
  std::uint64_t seq = 0;
  HyperValue hyperparameter;
  Matrix<float> coords;
  std::vector<std::int32_t> labels;
  std::string error_class;
  std::string message;
};

std::string encode_layout(std::uint64_t seq, const HyperValue& h, const Matrix<float>& coords,
                          const std::vector<int>& labels);
std::string encode_error(std::uint64_t seq, std::string_view error_class, std::string_view message);
std::string encode_request(std::uint64_t seq, const HyperValue& h);
Frame decode(std::string_view bytes);

/// A client request in text form: `{"seq": 3, "h": 17.5}` or `{"seq": 3, "h": [1, 0.5]}`.
/// Throws invalid_argument with the offending part; `seq` is filled in as
/// soon as it has been read so an error reply can echo it.
HyperValue parse_text_request(std::string_view text, std::uint64_t& seq);

/// "17.5" or "1,0.5,0" as used in query strings.
HyperValue parse_hyper_list(std::string_view text);

}  // namespace hypernp::protocol
