#include "forge/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "forge/errors.hpp"

namespace forge::io {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

nlohmann::json read_json_file(const std::filesystem::path& path) {
  const std::string content = slurp(path);
  try {
    return nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& ex) {
    const auto upto = std::min<std::size_t>(ex.byte, content.size());
    const auto line = 1 + static_cast<std::size_t>(
                              std::count(content.begin(), content.begin() + upto, '\n'));
    throw ParseError(line, path.string() + ": " + ex.what());
  }
}

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(std::size_t, const nlohmann::json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& ex) {
      throw ParseError(line_no, path.string() + ": " + ex.what());
    }
    fn(line_no, value);
  }
}

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& row : rows) out << row.dump() << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

}  // namespace forge::io
