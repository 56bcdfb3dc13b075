// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#include "json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "figalign/error.hpp"

namespace figalign::detail {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open file", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open for writing", path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed", path.string());
}

void for_each_line(std::string_view text,
                   const std::function<void(std::size_t, std::string_view)>& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    bool blank = std::all_of(line.begin(), line.end(),
                             [](char c) { return c == ' ' || c == '\t'; });
    if (!blank) fn(line_no, line);
  }
}

Json parse_object(std::string_view line) {
  Json obj;
  try {
    obj = Json::parse(line.begin(), line.end());
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw std::runtime_error("line is not a JSON object");
  return obj;
}

namespace {

const Json* find(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

[[noreturn]] void bad(const char* key, const char* what) {
  throw std::runtime_error(std::string("field \"") + key + "\" " + what);
}

}  // namespace

std::string require_string(const Json& obj, const char* key) {
  auto v = optional_string(obj, key);
  if (!v) bad(key, "is required");
  return *v;
}

std::optional<std::string> optional_string(const Json& obj, const char* key) {
  const Json* v = find(obj, key);
  if (!v) return std::nullopt;
  if (!v->is_string()) bad(key, "must be a string");
  return v->get<std::string>();
}

long long require_int(const Json& obj, const char* key) {
  auto v = optional_int(obj, key);
  if (!v) bad(key, "is required");
  return *v;
}

std::optional<long long> optional_int(const Json& obj, const char* key) {
  const Json* v = find(obj, key);
  if (!v) return std::nullopt;
  if (!v->is_number_integer()) bad(key, "must be an integer");
  return v->get<long long>();
}

double require_number(const Json& obj, const char* key) {
  const Json* v = find(obj, key);
  if (!v) bad(key, "is required");
  if (!v->is_number()) bad(key, "must be a number");
  return v->get<double>();
}

const Json& require_array(const Json& obj, const char* key) {
  const Json* v = find(obj, key);
  if (!v) bad(key, "is required");
  if (!v->is_array()) bad(key, "must be an array");
  return *v;
}

void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw std::runtime_error("unexpected field \"" + it.key() + "\"");
  }
}

std::string dump_line(const OrderedJson& obj) {
  try {
    return obj.dump(-1, ' ', false, OrderedJson::error_handler_t::strict);
  } catch (const OrderedJson::type_error& e) {
    throw Error(ErrorCode::IoFailure, std::string("cannot serialize: ") + e.what());
  }
}

}  // namespace figalign::detail
