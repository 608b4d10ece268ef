#include "dwpt/snapshot.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "dwpt/error.hpp"

namespace dwpt {

namespace {

constexpr const char* kMagic = "dwpt-snapshot";

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_hex(const std::string& token, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size() || errno == ERANGE)
    fail(ErrorCode::format, "snapshot line " + std::to_string(line) + ": bad float '" + token + "'");
  return v;
}

// Reads "key rest-of-line" and returns rest; checks the key.
std::string expect(std::istream& in, const std::string& key, std::size_t& line) {
  std::string text;
  ++line;
  if (!std::getline(in, text))
    fail(ErrorCode::format, "snapshot truncated: expected '" + key + "' on line " + std::to_string(line));
  const auto space = text.find(' ');
  const std::string head = text.substr(0, space);
  if (head != key)
    fail(ErrorCode::format,
         "snapshot line " + std::to_string(line) + ": expected '" + key + "', found '" + head + "'");
  return space == std::string::npos ? std::string{} : text.substr(space + 1);
}

}  // namespace

std::uint64_t config_hash(const nlohmann::json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_snapshot(std::ostream& out, const Snapshot& s) {
  const Field& f = s.field;
  if (f.values.size() != f.grid.size()) fail(ErrorCode::invalid_argument, "snapshot: field size does not match its grid");
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(s.config_hash));
  out << kMagic << ' ' << kSnapshotVersion << '\n';
  out << "grid " << f.grid.to_json().dump() << '\n';
  out << "epsilon " << hex(f.epsilon) << ' ' << decimal(f.epsilon) << '\n';
  out << "potential " << s.potential.to_json().dump() << '\n';
  out << "config_hash " << hash << '\n';
  out << "values " << f.values.size() << '\n';
  for (double v : f.values) out << hex(v) << ' ' << decimal(v) << '\n';
  out << "end\n";
}

Snapshot read_snapshot(std::istream& in) {
  std::size_t line = 0;
  const std::string version_text = expect(in, kMagic, line);
  int version = 0;
  try {
    version = std::stoi(version_text);
  } catch (const std::exception&) {
    fail(ErrorCode::format, "snapshot: unreadable version '" + version_text + "'");
  }
  if (version != kSnapshotVersion)
    fail(ErrorCode::format, "unsupported snapshot version " + std::to_string(version) + " (this build reads version " +
                                std::to_string(kSnapshotVersion) + ")");

  Snapshot s;
  Grid grid;
  try {
    grid = Grid::from_json(nlohmann::json::parse(expect(in, "grid", line)));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format, std::string("snapshot: bad grid record: ") + e.what());
  }
  std::istringstream eps_line(expect(in, "epsilon", line));
  std::string eps_token;
  eps_line >> eps_token;
  const double eps = parse_hex(eps_token, line);
  try {
    s.potential = Potential::from_json(nlohmann::json::parse(expect(in, "potential", line)));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format, std::string("snapshot: bad potential record: ") + e.what());
  }
  const std::string hash = expect(in, "config_hash", line);
  char* end = nullptr;
  s.config_hash = std::strtoull(hash.c_str(), &end, 16);
  if (hash.size() != 16 || end != hash.c_str() + hash.size())
    fail(ErrorCode::format, "snapshot: config_hash must be 16 hex digits");

  const std::string count_text = expect(in, "values", line);
  const std::size_t expected = grid.size();
  std::size_t declared = 0;
  try {
    declared = std::stoull(count_text);
  } catch (const std::exception&) {
    fail(ErrorCode::format, "snapshot: unreadable value count '" + count_text + "'");
  }
  if (declared != expected)
    fail(ErrorCode::format, "snapshot value count mismatch: grid needs " + std::to_string(expected) +
                                " values, header declares " + std::to_string(declared));

  std::vector<double> values;
  values.reserve(expected);
  std::string text;
  while (std::getline(in, text)) {
    ++line;
    if (text == "end") break;
    std::istringstream row(text);
    std::string token;
    row >> token;
    values.push_back(parse_hex(token, line));
  }
  if (text != "end") fail(ErrorCode::format, "snapshot truncated: missing 'end' marker");
  if (values.size() != expected)
    fail(ErrorCode::format, "snapshot value count mismatch: expected " + std::to_string(expected) + " values, found " +
                                std::to_string(values.size()));
  s.field = Field(grid, std::move(values), eps);
  return s;
}

void save_snapshot(const Snapshot& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  write_snapshot(out, s);
  out.flush();
  if (!out) fail(ErrorCode::io, "write to '" + path.string() + "' failed");
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
  return read_snapshot(in);
}

}  // namespace dwpt
