#pragma once

// Tajima DST stitch files: a 512-byte text header followed by 3-byte
// movement records in 0.1 mm units, y pointing up.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "exofab/error.hpp"
#include "exofab/geometry.hpp"
#include "exofab/numeric.hpp"

namespace exofab::dst {

inline constexpr std::size_t kHeaderSize = 512;
inline constexpr int kMaxDelta = 121;
inline constexpr long kMaxCoordinate = 32767;  // 0.1 mm units
inline constexpr std::size_t kMaxNameLength = 16;
inline constexpr std::array<std::uint8_t, 3> kEndRecord{0x00, 0x00, 0xF3};

struct Record {
  int dx = 0;  // 0.1 mm units, [-121, 121]
  int dy = 0;
  bool jump = false;
  bool color_change = false;

  friend bool operator==(const Record&, const Record&) = default;
};

namespace detail {

struct Bit {
  std::uint8_t byte;
  std::uint8_t mask;
  int weight;
};

// Bit positions for each ternary weight: {+bit, -bit}.
inline constexpr std::array<std::array<Bit, 2>, 5> kXBits{{
    {{{0, 0x01, 1}, {0, 0x02, -1}}},
    {{{1, 0x01, 3}, {1, 0x02, -3}}},
    {{{0, 0x04, 9}, {0, 0x08, -9}}},
    {{{1, 0x04, 27}, {1, 0x08, -27}}},
    {{{2, 0x04, 81}, {2, 0x08, -81}}},
}};
inline constexpr std::array<std::array<Bit, 2>, 5> kYBits{{
    {{{0, 0x80, 1}, {0, 0x40, -1}}},
    {{{1, 0x80, 3}, {1, 0x40, -3}}},
    {{{0, 0x20, 9}, {0, 0x10, -9}}},
    {{{1, 0x20, 27}, {1, 0x10, -27}}},
    {{{2, 0x20, 81}, {2, 0x10, -81}}},
}};

// Balanced ternary digits for weights 1, 3, 9, 27, 81.
inline std::array<int, 5> balanced_ternary(int v) {
  std::array<int, 5> digits{};
  for (int& d : digits) {
    int r = ((v % 3) + 3) % 3;
    d = (r == 2) ? -1 : r;
    v = (v - d) / 3;
  }
  return digits;
}

inline void encode_axis(std::array<std::uint8_t, 3>& out, int v, const std::array<std::array<Bit, 2>, 5>& bits) {
  auto digits = balanced_ternary(v);
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] == 1) out[bits[i][0].byte] |= bits[i][0].mask;
    if (digits[i] == -1) out[bits[i][1].byte] |= bits[i][1].mask;
  }
}

inline bool decode_axis(std::span<const std::uint8_t, 3> in, const std::array<std::array<Bit, 2>, 5>& bits, int& v) {
  v = 0;
  for (const auto& pair : bits) {
    bool plus = in[pair[0].byte] & pair[0].mask;
    bool minus = in[pair[1].byte] & pair[1].mask;
    if (plus && minus) return false;
    if (plus) v += pair[0].weight;
    if (minus) v += pair[1].weight;
  }
  return true;
}

inline long quantize(double mm) { return std::lround(mm * 10.0); }

}  // namespace detail

inline std::array<std::uint8_t, 3> encode_record(const Record& r) {
  if (std::abs(r.dx) > kMaxDelta || std::abs(r.dy) > kMaxDelta)
    throw Error(ErrorCode::CoordinateOverflow, fmt::format("record delta ({}, {}) out of range", r.dx, r.dy));
  std::array<std::uint8_t, 3> out{0, 0, 0x03};
  detail::encode_axis(out, r.dx, detail::kXBits);
  detail::encode_axis(out, r.dy, detail::kYBits);
  if (r.jump) out[2] |= 0x80;
  if (r.color_change) out[2] |= 0x40;
  return out;
}

// Throws BadRecord for missing control bits or contradictory +/- bits.
inline Record decode_record(std::span<const std::uint8_t, 3> bytes, long offset = -1) {
  if ((bytes[2] & 0x03) != 0x03)
    throw Error(ErrorCode::BadRecord, fmt::format("record at offset {} lacks control bits", offset), 0, offset);
  Record r;
  if (!detail::decode_axis(bytes, detail::kXBits, r.dx) || !detail::decode_axis(bytes, detail::kYBits, r.dy))
    throw Error(ErrorCode::BadRecord, fmt::format("record at offset {} sets opposing bits", offset), 0, offset);
  r.jump = bytes[2] & 0x80;
  r.color_change = bytes[2] & 0x40;
  return r;
}

// Minimal record chain for a move: +/-121 chunks as jumps, then the final
// chunk carrying the move's own kind.
inline std::vector<Record> split_move(long dx, long dy, bool jump) {
  std::vector<Record> out;
  while (std::abs(dx) > kMaxDelta || std::abs(dy) > kMaxDelta) {
    long cx = std::clamp<long>(dx, -kMaxDelta, kMaxDelta);
    long cy = std::clamp<long>(dy, -kMaxDelta, kMaxDelta);
    out.push_back({static_cast<int>(cx), static_cast<int>(cy), true, false});
    dx -= cx;
    dy -= cy;
  }
  out.push_back({static_cast<int>(dx), static_cast<int>(dy), jump, false});
  return out;
}

struct Extents {
  long max_x = 0;  // +X
  long min_x = 0;  // -X stored as magnitude
  long max_y = 0;
  long min_y = 0;
  long end_x = 0;  // AX
  long end_y = 0;  // AY

  friend bool operator==(const Extents&, const Extents&) = default;
};

// Records for `plan` relative to the origin, without the end record. The
// first move is always made of jumps; a first stitch point gets an extra
// zero-length stitch record.
inline std::vector<Record> plan_records(const StitchPlan& plan) {
  std::vector<Record> records;
  long x = 0, y = 0;
  for (std::size_t i = 0; i < plan.points.size(); ++i) {
    const auto& p = plan.points[i];
    long qx = detail::quantize(p.pos.x), qy = detail::quantize(p.pos.y);
    if (std::abs(qx) > kMaxCoordinate || std::abs(qy) > kMaxCoordinate || !std::isfinite(p.pos.x) ||
        !std::isfinite(p.pos.y))
      throw Error(ErrorCode::CoordinateOverflow,
                  fmt::format("point {} at ({}, {}) mm exceeds +/-3276.7 mm", i, p.pos.x, p.pos.y));
    const bool jump = (i == 0) || p.kind == StitchKind::jump;
    for (const auto& r : split_move(qx - x, qy - y, jump)) records.push_back(r);
    if (i == 0 && p.kind == StitchKind::stitch) records.push_back({0, 0, false, false});
    x = qx;
    y = qy;
  }
  return records;
}

inline Extents extents_of(std::span<const Record> records) {
  Extents e;
  long x = 0, y = 0;
  for (const auto& r : records) {
    x += r.dx;
    y += r.dy;
    e.max_x = std::max(e.max_x, x);
    e.min_x = std::max(e.min_x, -x);
    e.max_y = std::max(e.max_y, y);
    e.min_y = std::max(e.min_y, -y);
  }
  e.end_x = x;
  e.end_y = y;
  return e;
}

inline std::string header_text(std::string_view name, std::size_t record_count, const Extents& e) {
  auto signed5 = [](long v) { return fmt::format("{}{:05d}", v < 0 ? '-' : '+', std::abs(v)); };
  std::string h;
  h += fmt::format("LA:{:<16}\r", name);
  h += fmt::format("ST:{:07d}\r", record_count);
  h += "CO:000\r";
  h += fmt::format("+X:{:05d}\r", e.max_x);
  h += fmt::format("-X:{:05d}\r", e.min_x);
  h += fmt::format("+Y:{:05d}\r", e.max_y);
  h += fmt::format("-Y:{:05d}\r", e.min_y);
  h += fmt::format("AX:{}\r", signed5(e.end_x));
  h += fmt::format("AY:{}\r", signed5(e.end_y));
  h += fmt::format("MX:{}\r", signed5(0));
  h += fmt::format("MY:{}\r", signed5(0));
  h += "PD:******\r";
  h += '\x1A';
  h.resize(kHeaderSize, ' ');
  return h;
}

inline std::vector<std::uint8_t> write_dst(const StitchPlan& plan, std::string_view name) {
  if (name.size() > kMaxNameLength)
    throw Error(ErrorCode::NameTooLong, fmt::format("design name '{}' exceeds {} characters", name, kMaxNameLength));
  for (char ch : name)
    if (ch == '\r' || ch == '\n' || ch == '\x1A')
      throw Error(ErrorCode::NameTooLong, "design name contains control characters");
  std::vector<Record> records = plan_records(plan);
  Extents e = extents_of(records);
  if (e.max_x > 99999 || e.min_x > 99999 || e.max_y > 99999 || e.min_y > 99999)
    throw Error(ErrorCode::CoordinateOverflow, "design extent does not fit the header");
  std::string header = header_text(name, records.size(), e);
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(kHeaderSize + 3 * (records.size() + 1));
  for (const auto& r : records) {
    auto b = encode_record(r);
    out.insert(out.end(), b.begin(), b.end());
  }
  out.insert(out.end(), kEndRecord.begin(), kEndRecord.end());
  return out;
}

struct Header {
  std::map<std::string, std::string> fields;
  std::string label;
  long stitch_count = 0;
  Extents extents;
};

struct ReadResult {
  StitchPlan plan;
  Header header;
  std::vector<Record> records;
  std::vector<std::string> warnings;  // header/stream mismatches
};

inline Header parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw Error(ErrorCode::BadHeader, "file shorter than the 512-byte header", 0, 0);
  Header h;
  std::size_t pos = 0;
  while (pos + 3 <= kHeaderSize && bytes[pos] != 0x1A) {
    std::size_t end = pos;
    while (end < kHeaderSize && bytes[end] != '\r' && bytes[end] != 0x1A) ++end;
    if (end >= kHeaderSize || bytes[end] != '\r') break;
    std::string field(bytes.begin() + static_cast<long>(pos), bytes.begin() + static_cast<long>(end));
    if (field.size() < 3 || field[2] != ':')
      throw Error(ErrorCode::BadHeader, fmt::format("malformed header field at offset {}", pos), 0,
                  static_cast<long>(pos));
    h.fields[field.substr(0, 2)] = field.substr(3);
    pos = end + 1;
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = h.fields.find(key);
    if (it == h.fields.end()) throw Error(ErrorCode::BadHeader, fmt::format("header lacks {} field", key));
    return it->second;
  };
  auto number = [&](const char* key) {
    auto v = parse_long(trim(get(key)));
    if (!v) throw Error(ErrorCode::BadHeader, fmt::format("header field {} is not a number", key));
    return *v;
  };
  h.label = std::string(trim(get("LA")));
  h.stitch_count = number("ST");
  h.extents.max_x = number("+X");
  h.extents.min_x = number("-X");
  h.extents.max_y = number("+Y");
  h.extents.min_y = number("-Y");
  h.extents.end_x = h.fields.count("AX") ? number("AX") : 0;
  h.extents.end_y = h.fields.count("AY") ? number("AY") : 0;
  return h;
}

// Decodes a DST stream into absolute millimeter points. Each record becomes
// one point; jump records become jump points.
inline ReadResult read_dst(std::span<const std::uint8_t> bytes) {
  ReadResult out;
  out.header = parse_header(bytes);
  long x = 0, y = 0;
  bool terminated = false;
  std::size_t pos = kHeaderSize;
  while (pos + 3 <= bytes.size()) {
    std::span<const std::uint8_t, 3> rec(bytes.data() + pos, 3);
    if (rec[0] == kEndRecord[0] && rec[1] == kEndRecord[1] && rec[2] == kEndRecord[2]) {
      terminated = true;
      break;
    }
    Record r = decode_record(rec, static_cast<long>(pos));
    out.records.push_back(r);
    x += r.dx;
    y += r.dy;
    StitchKind kind = (r.jump || r.color_change) ? StitchKind::jump : StitchKind::stitch;
    out.plan.points.push_back({{static_cast<double>(x) / 10.0, static_cast<double>(y) / 10.0}, kind, 0});
    pos += 3;
  }
  if (!terminated)
    throw Error(ErrorCode::BadRecord, fmt::format("no end record before offset {}", bytes.size()), 0,
                static_cast<long>(bytes.size()));

  // Runs are numbered by jump-separated stretches.
  std::uint32_t run = 0;
  for (std::size_t i = 0; i < out.plan.points.size(); ++i) {
    if (i > 0 && out.plan.points[i].kind == StitchKind::jump && out.plan.points[i - 1].kind != StitchKind::jump) ++run;
    out.plan.points[i].run = run;
  }

  if (out.header.stitch_count != static_cast<long>(out.records.size()))
    out.warnings.push_back(fmt::format("ExtentMismatch: header ST {} but {} records", out.header.stitch_count,
                                       out.records.size()));
  Extents actual = extents_of(out.records);
  if (!(actual == out.header.extents))
    out.warnings.push_back(fmt::format("ExtentMismatch: header extents +X{} -X{} +Y{} -Y{} AX{} AY{} vs decoded "
                                       "+X{} -X{} +Y{} -Y{} AX{} AY{}",
                                       out.header.extents.max_x, out.header.extents.min_x, out.header.extents.max_y,
                                       out.header.extents.min_y, out.header.extents.end_x, out.header.extents.end_y,
                                       actual.max_x, actual.min_x, actual.max_y, actual.min_y, actual.end_x,
                                       actual.end_y));
  return out;
}

}  // namespace exofab::dst
