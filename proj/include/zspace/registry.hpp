#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zspace/errors.hpp"
#include "zspace/vec.hpp"

namespace zspace {

struct ToolRecord {
  std::string name;
  std::string description;   // functions and parameters
  std::string environment;   // execution environment label
  std::string summary;
  std::vector<std::string> entity_tags;
  std::vector<std::string> capability_tags;
  Vector embedding;          // unit norm, derived from summary + description
};

inline std::string normalize_tag(std::string_view tag) {
  std::string out;
  out.reserve(tag.size());
  for (char c : tag) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  // trim
  const auto first = out.find_first_not_of(" \t");
  const auto last = out.find_last_not_of(" \t");
  if (first == std::string::npos) return {};
  return out.substr(first, last - first + 1);
}

inline std::vector<std::string> normalize_tags(const std::vector<std::string>& tags) {
  std::vector<std::string> out;
  for (const auto& t : tags) {
    std::string n = normalize_tag(t);
    if (n.empty()) continue;
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  }
  return out;
}

// Name-keyed tool store plus an inverted tag index. Single writer,
// many readers; register_tool and load take exclusive access.
class ToolRegistry {
 public:
  explicit ToolRegistry(size_t dim = 0) : dim_(dim) {}

  size_t dim() const { return dim_; }
  size_t size() const { return tools_.size(); }
  bool empty() const { return tools_.empty(); }
  const std::map<std::string, ToolRecord>& tools() const { return tools_; }

  const ToolRecord* find(const std::string& name) const {
    const auto it = tools_.find(name);
    return it == tools_.end() ? nullptr : &it->second;
  }

  // Insert-or-replace by name. Tags are lowercased and deduplicated;
  // the tag index stays the exact inverse of the stored tag lists.
  void register_tool(ToolRecord rec) {
    if (rec.name.empty()) throw Error("tool name must be non-empty");
    if (!near_unit(rec.embedding, 1e-6)) {
      throw Error("tool '" + rec.name + "': embedding must be unit norm");
    }
    if (dim_ == 0) dim_ = rec.embedding.size();
    if (rec.embedding.size() != dim_) {
      throw DimMismatchError(rec.embedding.size(), dim_);
    }
    rec.entity_tags = normalize_tags(rec.entity_tags);
    rec.capability_tags = normalize_tags(rec.capability_tags);

    const auto old = tools_.find(rec.name);
    if (old != tools_.end()) unindex(old->second);
    index(rec);
    tools_[rec.name] = std::move(rec);
  }

  std::set<std::string> lookup_by_tag(std::string_view tag) const {
    const auto it = tag_index_.find(normalize_tag(tag));
    return it == tag_index_.end() ? std::set<std::string>{} : it->second;
  }

  const std::map<std::string, std::set<std::string>>& tag_index() const {
    return tag_index_;
  }

 private:
  void index(const ToolRecord& rec) {
    for (const auto& t : rec.entity_tags) tag_index_[t].insert(rec.name);
    for (const auto& t : rec.capability_tags) tag_index_[t].insert(rec.name);
  }

  void unindex(const ToolRecord& rec) {
    auto drop = [&](const std::string& t) {
      const auto it = tag_index_.find(t);
      if (it == tag_index_.end()) return;
      it->second.erase(rec.name);
      if (it->second.empty()) tag_index_.erase(it);
    };
    for (const auto& t : rec.entity_tags) drop(t);
    for (const auto& t : rec.capability_tags) drop(t);
  }

  size_t dim_;
  std::map<std::string, ToolRecord> tools_;
  std::map<std::string, std::set<std::string>> tag_index_;
};

// The fixed rule for which text feeds a tool embedding.
inline std::string tool_embedding_text(const ToolRecord& rec) {
  return rec.summary + " " + rec.description;
}

// 17 significant digits round-trip a double exactly, so
// save -> load -> save is byte-stable.
inline std::string format_double17(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace detail {

inline void append_json_string(std::string& out, const std::string& s) {
  out += nlohmann::json(s).dump();
}

inline void append_string_array(std::string& out, const std::vector<std::string>& v) {
  out += '[';
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    append_json_string(out, v[i]);
  }
  out += ']';
}

inline void append_number_array(std::string& out, const Vector& v) {
  out += '[';
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double17(v[i]);
  }
  out += ']';
}

}  // namespace detail

// Canonical single-line form: fixed key order, fixed float formatting.
inline std::string registry_line(const ToolRecord& rec) {
  std::string out;
  out += "{\"name\":";
  detail::append_json_string(out, rec.name);
  out += ",\"description\":";
  detail::append_json_string(out, rec.description);
  out += ",\"environment\":";
  detail::append_json_string(out, rec.environment);
  out += ",\"summary\":";
  detail::append_json_string(out, rec.summary);
  out += ",\"entityTags\":";
  detail::append_string_array(out, rec.entity_tags);
  out += ",\"capabilityTags\":";
  detail::append_string_array(out, rec.capability_tags);
  out += ",\"embedding\":";
  detail::append_number_array(out, rec.embedding);
  out += '}';
  return out;
}

inline ToolRecord record_from_json(const nlohmann::json& j, int line_no,
                                   bool require_embedding = true) {
  ToolRecord rec;
  auto need_string = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j[key].is_string()) {
      throw ParseError(line_no, std::string("missing or non-string field '") + key + "'");
    }
    return j[key].get<std::string>();
  };
  auto need_string_array = [&](const char* key) -> std::vector<std::string> {
    if (!j.contains(key) || !j[key].is_array()) {
      throw ParseError(line_no, std::string("missing or non-array field '") + key + "'");
    }
    std::vector<std::string> out;
    for (const auto& e : j[key]) {
      if (!e.is_string()) throw ParseError(line_no, std::string("non-string entry in '") + key + "'");
      out.push_back(e.get<std::string>());
    }
    return out;
  };

  rec.name = need_string("name");
  if (rec.name.empty()) throw ParseError(line_no, "field 'name' must be non-empty");
  rec.description = need_string("description");
  rec.environment = need_string("environment");
  rec.summary = need_string("summary");
  rec.entity_tags = need_string_array("entityTags");
  rec.capability_tags = need_string_array("capabilityTags");

  if (j.contains("embedding")) {
    if (!j["embedding"].is_array()) throw ParseError(line_no, "field 'embedding' must be an array");
    for (const auto& e : j["embedding"]) {
      if (!e.is_number()) throw ParseError(line_no, "non-numeric entry in 'embedding'");
      rec.embedding.push_back(e.get<double>());
    }
  } else if (require_embedding) {
    throw ParseError(line_no, "missing or non-array field 'embedding'");
  }
  return rec;
}

inline ToolRecord record_from_json_line(const std::string& line, int line_no,
                                        bool require_embedding = true) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line_no, e.what());
  }
  if (!j.is_object()) throw ParseError(line_no, "expected a JSON object");
  return record_from_json(j, line_no, require_embedding);
}

inline ToolRegistry load_registry_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  ToolRegistry reg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ToolRecord rec = record_from_json_line(line, line_no);
    try {
      reg.register_tool(std::move(rec));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return reg;
}

inline void save_registry_jsonl(const ToolRegistry& reg, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& [name, rec] : reg.tools()) {
    out << registry_line(rec) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace zspace
