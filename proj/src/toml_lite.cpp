#include "narz/toml_lite.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "narz/errors.hpp"

namespace narz {

namespace {

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string drop_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

nlohmann::json parse_scalar(const std::string& raw, int line_no) {
  std::string v = strip(raw);
  if (v.empty()) throw ConfigError("toml: empty value at line " + std::to_string(line_no));
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      throw ConfigError("toml: unterminated string at line " + std::to_string(line_no));
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  try {
    if (v.find_first_of(".eE") == std::string::npos) {
      std::size_t pos = 0;
      long long i = std::stoll(v, &pos);
      if (pos == v.size()) return i;
    }
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (...) {
  }
  throw ConfigError("toml: cannot parse value '" + v + "' at line " + std::to_string(line_no));
}

nlohmann::json parse_value(const std::string& raw, int line_no) {
  std::string v = strip(raw);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']')
      throw ConfigError("toml: unterminated array at line " + std::to_string(line_no));
    nlohmann::json arr = nlohmann::json::array();
    std::string body = v.substr(1, v.size() - 2);
    std::string cell;
    bool in_str = false;
    for (char ch : body) {
      if (ch == '"') in_str = !in_str;
      if (ch == ',' && !in_str) {
        if (!strip(cell).empty()) arr.push_back(parse_scalar(cell, line_no));
        cell.clear();
      } else {
        cell += ch;
      }
    }
    if (!strip(cell).empty()) arr.push_back(parse_scalar(cell, line_no));
    return arr;
  }
  return parse_scalar(v, line_no);
}

}  // namespace

nlohmann::json parse_toml_lite(const std::string& text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* table = &root;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(drop_comment(line));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("toml: bad table header at line " + std::to_string(line_no));
      std::string name = strip(line.substr(1, line.size() - 2));
      if (name.empty()) throw ConfigError("toml: empty table name at line " + std::to_string(line_no));
      table = &root;
      std::stringstream ss(name);
      std::string part;
      while (std::getline(ss, part, '.')) {
        part = strip(part);
        table = &(*table)[part];
        if (table->is_null()) *table = nlohmann::json::object();
      }
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("toml: expected key = value at line " + std::to_string(line_no));
    std::string key = strip(line.substr(0, eq));
    if (key.empty()) throw ConfigError("toml: empty key at line " + std::to_string(line_no));
    if (key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    (*table)[key] = parse_value(line.substr(eq + 1), line_no);
  }
  return root;
}

nlohmann::json load_config_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  if (path.extension() == ".toml") return parse_toml_lite(buf.str());
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
}

}  // namespace narz
