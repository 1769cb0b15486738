#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fermi_landauer {

// Shortest-free, locale-independent "%.17g" rendering; round-trips exactly.
std::string format_number(double value);
// Empty string for std::nullopt (CSV) -- JSON callers emit null instead.
std::string format_number(const std::optional<double>& value);

// Column-oriented result table. Cells are already rendered: numbers via
// format_number, undefined values as the empty string.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

void render_csv(std::ostream& out, const Table& table);
// Array of row objects; numeric cells stay numbers, empty cells become null.
std::string render_json_rows(const Table& table, int indent);

// Minimal ordered JSON builder that keeps the 17-digit number rendering.
class JsonObject {
 public:
  JsonObject& number(const std::string& key, double value);
  JsonObject& number(const std::string& key, const std::optional<double>& value);
  JsonObject& integer(const std::string& key, long long value);
  JsonObject& boolean(const std::string& key, bool value);
  JsonObject& string(const std::string& key, const std::string& value);
  JsonObject& object(const std::string& key, const JsonObject& value);
  // Pre-rendered JSON (e.g. from render_json_rows).
  JsonObject& raw(const std::string& key, const std::string& json);

  std::string dump(int indent = 0) const;

 private:
  struct Member {
    std::string key;
    std::string value;  // rendered scalar or array
    int nested = -1;    // index into nested_ for object members
  };
  std::vector<Member> members_;
  std::vector<JsonObject> nested_;
};

std::string json_quote(std::string_view text);

// A fully rendered artifact waiting to be written.
struct Artifact {
  std::string filename;
  std::string contents;
};

// Writes every artifact into `directory` (created if needed). Files are
// staged next to their targets and renamed once all writes succeed; on any
// failure the staged and already-renamed files are removed before the
// exception propagates.
void write_artifacts(const std::filesystem::path& directory,
                     const std::vector<Artifact>& artifacts);

}  // namespace fermi_landauer
