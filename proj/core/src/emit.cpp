#include "fermi_landauer/emit.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "fermi_landauer/errors.hpp"

namespace fermi_landauer {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // fold -0 into 0
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string format_number(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string{};
}

void render_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

namespace {

bool is_json_number(const std::string& cell) {
  if (cell.empty() || cell == "nan" || cell == "inf" || cell == "-inf") {
    return false;
  }
  char* end = nullptr;
  std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size();
}

std::string json_cell(const std::string& cell) {
  if (cell.empty() || cell == "nan" || cell == "inf" || cell == "-inf") {
    return "null";
  }
  return is_json_number(cell) ? cell : json_quote(cell);
}

std::string pad(int indent) {
  return std::string(static_cast<std::size_t>(indent), ' ');
}

}  // namespace

std::string json_quote(std::string_view text) {
  std::string out = "\"";
  for (const char ch : text) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buffer[8];
          std::snprintf(buffer, sizeof buffer, "\\u%04x", ch);
          out += buffer;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
  return out;
}

std::string render_json_rows(const Table& table, int indent) {
  if (table.rows.empty()) return "[]";
  std::ostringstream out;
  out << "[\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << pad(indent + 2) << "{";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? ", " : "") << json_quote(table.columns[c]) << ": "
          << json_cell(table.rows[r][c]);
    }
    out << "}" << (r + 1 < table.rows.size() ? "," : "") << "\n";
  }
  out << pad(indent) << "]";
  return out.str();
}

JsonObject& JsonObject::number(const std::string& key, double value) {
  members_.push_back({key, std::isfinite(value) ? format_number(value) : "null"});
  return *this;
}

JsonObject& JsonObject::number(const std::string& key,
                               const std::optional<double>& value) {
  if (!value) {
    members_.push_back({key, "null"});
    return *this;
  }
  return number(key, *value);
}

JsonObject& JsonObject::integer(const std::string& key, long long value) {
  members_.push_back({key, std::to_string(value)});
  return *this;
}

JsonObject& JsonObject::boolean(const std::string& key, bool value) {
  members_.push_back({key, value ? "true" : "false"});
  return *this;
}

JsonObject& JsonObject::string(const std::string& key,
                               const std::string& value) {
  members_.push_back({key, json_quote(value)});
  return *this;
}

JsonObject& JsonObject::object(const std::string& key,
                               const JsonObject& value) {
  members_.push_back({key, {}, static_cast<int>(nested_.size())});
  nested_.push_back(value);
  return *this;
}

JsonObject& JsonObject::raw(const std::string& key, const std::string& json) {
  members_.push_back({key, json});
  return *this;
}

std::string JsonObject::dump(int indent) const {
  if (members_.empty()) return "{}";
  std::ostringstream out;
  out << "{\n";
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const Member& m = members_[i];
    out << pad(indent + 2) << json_quote(m.key) << ": ";
    if (m.nested >= 0) {
      out << nested_[static_cast<std::size_t>(m.nested)].dump(indent + 2);
    } else {
      out << m.value;
    }
    out << (i + 1 < members_.size() ? "," : "") << "\n";
  }
  out << pad(indent) << "}";
  return out.str();
}

void write_artifacts(const std::filesystem::path& directory,
                     const std::vector<Artifact>& artifacts) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " +
                             directory.string() + ": " + ec.message());
  }

  std::vector<fs::path> staged;
  std::vector<fs::path> committed;
  auto cleanup = [&] {
    std::error_code ignored;
    for (const auto& p : staged) fs::remove(p, ignored);
    for (const auto& p : committed) fs::remove(p, ignored);
  };

  try {
    for (const auto& artifact : artifacts) {
      const fs::path tmp = directory / (artifact.filename + ".partial");
      staged.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << artifact.contents;
      out.close();
      if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    for (std::size_t i = 0; i < artifacts.size(); ++i) {
      const fs::path target = directory / artifacts[i].filename;
      fs::rename(staged[i], target);
      committed.push_back(target);
    }
    staged.clear();
  } catch (...) {
    cleanup();
    throw;
  }
}

}  // namespace fermi_landauer
