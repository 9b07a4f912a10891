#include "mg/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <algorithm>
#include <stdexcept>

namespace mg {

namespace {

void append_i64(std::string& out, std::int64_t v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, p);
}

}  // namespace

std::string trace_csv_string(const Trace& trace) {
  std::string out;
  {
    std::ostringstream head;
    head << "# mg-trace v1 config_hash=" << std::hex << trace.config_hash << std::dec
         << " utility_scale=" << trace.utility_scale
         << " full_space=" << (trace.full_space ? 1 : 0)
         << " max_abs_utility=" << trace.max_abs_utility << "\n";
    std::istringstream cfg(trace.config.canonical_text());
    std::string line;
    while (std::getline(cfg, line)) head << "# cfg " << line << "\n";
    if (!trace.full_space) {
      head << "# tracked_ids";
      for (std::uint64_t id : trace.tracked_ids) head << " " << id;
      head << "\n";
    }
    head << "# agent_slots";
    for (std::uint32_t s : trace.agent_slots) head << " " << s;
    head << "\n";
    out = head.str();
  }

  out += "t,A,minority,history";
  if (trace.has_utilities)
    for (std::size_t j = 0; j < trace.columns(); ++j) {
      out += ",U_";
      append_i64(out, static_cast<std::int64_t>(trace.tracked_ids[j]));
    }
  out += "\n";

  const std::size_t cols = trace.columns();
  for (std::int64_t t = 0; t < trace.steps(); ++t) {
    append_i64(out, t);
    out += ',';
    append_i64(out, trace.demand[t]);
    out += ',';
    append_i64(out, trace.minority[t]);
    out += ',';
    append_i64(out, trace.history[t]);
    if (trace.has_utilities) {
      const std::int64_t* row = trace.utility_row(t);
      for (std::size_t j = 0; j < cols; ++j) {
        out += ',';
        append_i64(out, row[j]);
      }
    }
    out += '\n';
  }
  return out;
}

void write_trace_csv(const Trace& trace, const std::string& path) {
  // atomic write: temp file then rename
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << trace_csv_string(trace);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

Trace parse_trace_csv(const std::string& text) {
  Trace tr;
  std::istringstream in(text);
  std::string line;
  std::string config_text;
  bool header_seen = false;
  std::size_t cols = 0;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line);
      std::string hash_mark, tag;
      ls >> hash_mark >> tag;
      if (tag == "cfg") {
        std::string rest;
        std::getline(ls, rest);
        config_text += rest + "\n";
      } else if (tag == "tracked_ids") {
        std::uint64_t id;
        while (ls >> id) tr.tracked_ids.push_back(id);
      } else if (tag == "agent_slots") {
        std::uint32_t s;
        while (ls >> s) tr.agent_slots.push_back(s);
      } else if (tag == "mg-trace") {
        std::string kv;
        while (ls >> kv) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) continue;
          const std::string key = kv.substr(0, eq);
          const std::string val = kv.substr(eq + 1);
          if (key == "utility_scale") tr.utility_scale = std::stoll(val);
          if (key == "full_space") tr.full_space = val == "1";
          if (key == "max_abs_utility") tr.max_abs_utility = std::stoll(val);
          if (key == "config_hash") tr.config_hash = std::stoull(val, nullptr, 16);
        }
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      cols = 0;
      std::size_t pos = 0;
      while ((pos = line.find(",U_", pos)) != std::string::npos) {
        ++cols;
        ++pos;
      }
      tr.has_utilities = cols > 0;
      continue;
    }
    const char* p = line.data();
    const char* end = p + line.size();
    auto next_i64 = [&]() -> std::int64_t {
      if (p < end && *p == ',') ++p;
      std::int64_t v = 0;
      auto [np, ec] = std::from_chars(p, end, v);
      if (ec != std::errc())
        throw std::runtime_error("malformed trace row: " + line);
      p = np;
      return v;
    };
    next_i64();  // t
    tr.demand.push_back(next_i64());
    tr.minority.push_back(static_cast<std::int8_t>(next_i64()));
    tr.history.push_back(static_cast<std::uint32_t>(next_i64()));
    for (std::size_t j = 0; j < cols; ++j) tr.utilities.push_back(next_i64());
  }

  tr.config = parse_config_text(config_text);
  tr.config_hash = tr.config.hash();
  if (tr.tracked_ids.empty()) {
    // full-space trace: columns are ids 0..2^P-1
    const std::uint64_t space = strategy_space_size(tr.config.memory);
    tr.full_space = true;
    tr.tracked_ids.resize(space);
    for (std::uint64_t i = 0; i < space; ++i) tr.tracked_ids[i] = i;
  }
  if (tr.has_utilities && cols != tr.tracked_ids.size())
    throw std::runtime_error("utility column count does not match tracked ids");
  if (tr.has_utilities && tr.max_abs_utility == 0)
    for (std::int64_t u : tr.utilities)
      tr.max_abs_utility =
          std::max<std::int64_t>(tr.max_abs_utility, std::llabs(u));
  return tr;
}

Trace read_trace_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_trace_csv(os.str());
}

}  // namespace mg
