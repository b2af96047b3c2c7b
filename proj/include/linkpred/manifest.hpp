#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace linkpred {

/// One dataset the experiment driver can load: a display name, an edge-list
/// path, and whether the file's weights live outside (0,1) and need the
/// regularizing transform before reliability-style use.
struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  bool weights_need_transform = false;
};

class ManifestError : public std::runtime_error {
public:
  ManifestError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Parses a dataset manifest:
///
///   # comment
///   [Dataset Name]
///   path = relative/or/absolute.edges
///   weights_need_transform = true
///
/// Relative paths are resolved against base_dir. Sections keep file order;
/// every section must set `path`.
inline std::vector<DatasetSpec> parse_manifest(std::istream& in,
                                               const std::filesystem::path& base_dir) {
  std::vector<DatasetSpec> specs;
  bool open_section = false;
  bool has_path = false;
  std::size_t section_line = 0;
  std::string line;
  std::size_t lineno = 0;

  auto close_section = [&] {
    if (open_section && !has_path)
      throw ManifestError("manifest section '" + specs.back().name + "' has no path",
                          section_line);
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ManifestError("unterminated section header", lineno);
      std::string_view name = detail::trim(s.substr(1, s.size() - 2));
      if (name.empty()) throw ManifestError("empty section name", lineno);
      for (const DatasetSpec& d : specs)
        if (d.name == name) throw ManifestError("duplicate section name", lineno);
      close_section();
      specs.push_back({std::string(name), {}, false});
      open_section = true;
      has_path = false;
      section_line = lineno;
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string_view::npos) throw ManifestError("expected key = value", lineno);
    if (!open_section) throw ManifestError("key outside any section", lineno);
    const std::string_view key = detail::trim(s.substr(0, eq));
    const std::string_view value = detail::trim(s.substr(eq + 1));
    if (key == "path") {
      if (value.empty()) throw ManifestError("empty path", lineno);
      std::filesystem::path p{std::string(value)};
      specs.back().path = p.is_absolute() ? p : base_dir / p;
      has_path = true;
    } else if (key == "weights_need_transform") {
      if (value == "true") {
        specs.back().weights_need_transform = true;
      } else if (value == "false") {
        specs.back().weights_need_transform = false;
      } else {
        throw ManifestError("weights_need_transform must be true or false", lineno);
      }
    } else {
      throw ManifestError("unknown key '" + std::string(key) + "'", lineno);
    }
  }
  close_section();
  if (specs.empty()) throw ManifestError("manifest lists no datasets", lineno ? lineno : 1);
  return specs;
}

inline std::vector<DatasetSpec> load_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
  return parse_manifest(in, path.parent_path());
}

}  // namespace linkpred
