#include "sqe/config.hpp"

#include <fstream>
#include <sstream>

#include "sqe/numfmt.hpp"

namespace sqe {

namespace {

std::string trim_copy(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_fail(const std::string& origin, std::size_t line_no,
                              const std::string& what) {
  throw ParseError(origin + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim_copy(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') config_fail(origin, line_no, "unterminated section header");
      section = trim_copy(s.substr(1, s.size() - 2));
      if (section != "sqe" && section != "tracker" && section != "distance") {
        config_fail(origin, line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) config_fail(origin, line_no, "expected key = value");
    std::string key = trim_copy(s.substr(0, eq));
    std::string value = trim_copy(s.substr(eq + 1));

    auto as_double = [&](double& out) {
      if (!parse_double(value, out)) config_fail(origin, line_no, "bad number for " + key);
    };
    auto as_int = [&](std::int64_t& out) {
      if (!parse_int64(value, out)) config_fail(origin, line_no, "bad integer for " + key);
    };

    if (section == "sqe") {
      if (key == "delta_L") as_double(cfg.delta_L);
      else if (key == "delta_D") as_double(cfg.delta_D);
      else if (key == "delta_m") as_double(cfg.delta_m);
      else if (key == "k1") as_double(cfg.k1);
      else if (key == "k2_reid") as_double(cfg.k2_reid);
      else if (key == "k2_merge") as_double(cfg.k2_merge);
      else config_fail(origin, line_no, "unknown key '" + key + "' in [sqe]");
    } else if (section == "tracker") {
      if (key == "max_gap") as_int(cfg.max_gap);
      else config_fail(origin, line_no, "unknown key '" + key + "' in [tracker]");
    } else if (section == "distance") {
      if (key == "max_pairs") {
        std::int64_t v = 0;
        as_int(v);
        if (v < 1) config_fail(origin, line_no, "max_pairs must be >= 1");
        cfg.max_pairs = static_cast<std::size_t>(v);
      } else if (key == "normalize") {
        if (value == "true" || value == "1") cfg.normalize = true;
        else if (value == "false" || value == "0") cfg.normalize = false;
        else config_fail(origin, line_no, "normalize must be true or false");
      } else {
        config_fail(origin, line_no, "unknown key '" + key + "' in [distance]");
      }
    } else {
      config_fail(origin, line_no, "key outside of any section");
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

}  // namespace sqe
