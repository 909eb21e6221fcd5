#include "hypernp/service/protocol.hpp"

#include <charconv>
#include <cmath>

#include <json.hpp>

#include "hypernp/io/binary.hpp"

namespace hypernp::protocol {
namespace {

void header(binary::Writer& w, FrameType type, std::uint16_t flags, std::uint64_t seq) {
  w.raw(kMagic);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(type));
  w.u16(flags);
  w.u64(seq);
}

void check_hyper(const HyperValue& h) {
  if (h.empty()) fail(ErrorKind::invalid_argument, "h is empty");
  for (const double v : h) {
    if (!std::isfinite(v)) fail(ErrorKind::invalid_argument, "h has a non-finite component");
  }
}

}  // namespace

std::string encode_layout(std::uint64_t seq, const HyperValue& h, const Matrix<float>& coords,
                          const std::vector<int>& labels) {
  if (coords.cols() != 2) fail(ErrorKind::dimension_mismatch, "layout frame needs N x 2 coordinates");
  if (!labels.empty() && labels.size() != coords.rows()) {
    fail(ErrorKind::dimension_mismatch, "layout frame: label count differs from point count");
  }
  binary::Writer w;
  header(w, FrameType::layout, labels.empty() ? 0 : kFlagLabels, seq);
  w.u32(static_cast<std::uint32_t>(h.size()));
  w.u32(static_cast<std::uint32_t>(coords.rows()));
  for (const double v : h) w.f64(v);
  for (const float v : coords.values()) w.f32(v);
  for (const int l : labels) w.i32(l);
  return w.take();
}

std::string encode_error(std::uint64_t seq, std::string_view error_class, std::string_view message) {
  binary::Writer w;
  header(w, FrameType::error, 0, seq);
  w.str(error_class);
  w.str(message);
  return w.take();
}

std::string encode_request(std::uint64_t seq, const HyperValue& h) {
  binary::Writer w;
  header(w, FrameType::request, 0, seq);
  w.u32(static_cast<std::uint32_t>(h.size()));
  for (const double v : h) w.f64(v);
  return w.take();
}

Frame decode(std::string_view bytes) {
  binary::Reader r(bytes, "frame");
  if (r.raw(4) != kMagic) fail(ErrorKind::format, "frame: bad magic");
  if (const auto v = r.u8(); v != kVersion) fail(ErrorKind::format, "frame: unsupported version " + std::to_string(v));
  Frame f;
  const auto type = r.u8();
  if (type < 1 || type > 3) fail(ErrorKind::format, "frame: unknown type " + std::to_string(type));
  f.type = static_cast<FrameType>(type);
  const auto flags = r.u16();
  f.seq = r.u64();
  switch (f.type) {
    case FrameType::layout: {
      const auto hn = r.u32();
      const auto n = r.u32();
      if (r.remaining() < std::size_t{hn} * 8 + std::size_t{n} * 8) fail(ErrorKind::format, "frame: truncated layout");
      for (std::uint32_t i = 0; i < hn; ++i) f.hyperparameter.push_back(r.f64());
      f.coords = Matrix<float>(n, 2);
      for (auto& v : f.coords.values()) v = r.f32();
      if (flags & kFlagLabels) {
        f.labels.resize(n);
        for (auto& l : f.labels) l = r.i32();
      }
      break;
    }
    case FrameType::error:
      f.error_class = r.str();
      f.message = r.str();
      break;
    case FrameType::request: {
      const auto hn = r.u32();
      if (r.remaining() < std::size_t{hn} * 8) fail(ErrorKind::format, "frame: truncated request");
      for (std::uint32_t i = 0; i < hn; ++i) f.hyperparameter.push_back(r.f64());
      break;
    }
  }
  if (r.remaining() != 0) fail(ErrorKind::format, "frame: trailing bytes");
  return f;
}

HyperValue parse_text_request(std::string_view text, std::uint64_t& seq) {
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail(ErrorKind::invalid_argument, "request is not a JSON object");
  if (const auto it = doc.find("seq"); it != doc.end()) {
    if (!it->is_number_unsigned()) fail(ErrorKind::invalid_argument, "seq must be a non-negative integer");
    seq = it->get<std::uint64_t>();
  }
  const auto it = doc.find("h");
  if (it == doc.end()) fail(ErrorKind::invalid_argument, "request has no h");
  HyperValue h;
  if (it->is_number()) {
    h.push_back(it->get<double>());
  } else if (it->is_array()) {
    for (const auto& v : *it) {
      if (!v.is_number()) fail(ErrorKind::invalid_argument, "h components must be numbers");
      h.push_back(v.get<double>());
    }
  } else {
    fail(ErrorKind::invalid_argument, "h must be a number or an array of numbers");
  }
  check_hyper(h);
  return h;
}

HyperValue parse_hyper_list(std::string_view text) {
  HyperValue h;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find(',', pos), text.size());
    const auto part = text.substr(pos, end - pos);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      fail(ErrorKind::invalid_argument, "malformed h component '" + std::string(part) + "'");
    }
    h.push_back(v);
    pos = end + 1;
  }
  check_hyper(h);
  return h;
}

}  // namespace hypernp::protocol
