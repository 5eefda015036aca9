#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "handoff/time.hpp"

namespace handoff {

/// Per-event log: `time_us,event_kind,ms_id,ap_id,detail`.
///
/// Every record is folded into a 64-bit FNV-1a digest whether or not a
/// sink is attached, so two runs can be compared without writing a trace.
class EventLog {
 public:
  explicit EventLog(std::ostream* sink = nullptr) : sink_(sink) {}

  void record(SimTime t, std::string_view kind, std::int64_t ms, std::int64_t ap, std::string_view detail = {}) {
    line_.clear();
    append_int(t.micros());
    line_ += ',';
    line_ += kind;
    line_ += ',';
    append_int(ms);
    line_ += ',';
    append_int(ap);
    line_ += ',';
    line_ += detail;
    for (unsigned char c : line_) {
      hash_ ^= c;
      hash_ *= 0x100000001B3ULL;
    }
    hash_ ^= '\n';
    hash_ *= 0x100000001B3ULL;
    ++count_;
    if (sink_) {
      *sink_ << line_ << '\n';
      if (!*sink_) throw std::ios_base::failure("trace write failed");
    }
  }

  std::uint64_t hash() const { return hash_; }
  std::uint64_t count() const { return count_; }

 private:
  void append_int(std::int64_t v) {
    char buf[24];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    line_.append(buf, p);
  }

  std::ostream* sink_;
  std::string line_;
  std::uint64_t hash_ = 0xCBF29CE484222325ULL;
  std::uint64_t count_ = 0;
};

/// Builds `k=v;k=v` detail fields.
class Detail {
 public:
  Detail& add(std::string_view key, std::int64_t v) {
    sep();
    s_ += key;
    s_ += '=';
    char buf[24];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    s_.append(buf, p);
    return *this;
  }
  Detail& add(std::string_view key, std::string_view v) {
    sep();
    s_ += key;
    s_ += '=';
    s_ += v;
    return *this;
  }
  const std::string& str() const { return s_; }

 private:
  void sep() {
    if (!s_.empty()) s_ += ';';
  }
  std::string s_;
};

struct TraceRecord {
  std::int64_t time_us = 0;
  std::string kind;
  std::int64_t ms = -1;
  std::int64_t ap = -1;
  std::map<std::string, std::string, std::less<>> detail;

  std::int64_t num(std::string_view key) const {
    auto it = detail.find(key);
    if (it == detail.end()) throw std::runtime_error("trace record lacks field " + std::string(key));
    std::int64_t v = 0;
    const auto& s = it->second;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw std::runtime_error("bad integer in trace: " + s);
    return v;
  }
  const std::string& text(std::string_view key) const {
    auto it = detail.find(key);
    if (it == detail.end()) throw std::runtime_error("trace record lacks field " + std::string(key));
    return it->second;
  }
};

inline TraceRecord parse_trace_line(std::string_view line) {
  TraceRecord r;
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  for (int i = 0; i < 4; ++i) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) throw std::runtime_error("malformed trace line: " + std::string(line));
    cols.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  const auto detail = line.substr(start);
  auto to_int = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw std::runtime_error("malformed trace line: " + std::string(line));
    return v;
  };
  r.time_us = to_int(cols[0]);
  r.kind = std::string(cols[1]);
  r.ms = to_int(cols[2]);
  r.ap = to_int(cols[3]);
  std::size_t pos = 0;
  while (pos < detail.size()) {
    auto end = detail.find(';', pos);
    if (end == std::string_view::npos) end = detail.size();
    const auto kv = detail.substr(pos, end - pos);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw std::runtime_error("malformed detail: " + std::string(kv));
    r.detail.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
    pos = end + 1;
  }
  return r;
}

}  // namespace handoff
