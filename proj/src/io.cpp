#include "invasion/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "invasion/version.hpp"

namespace invasion {

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("rename failed: " + tmp + " -> " + path);
  }
}

std::string metadata_block(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string block;
  for (const auto& [key, value] : kv) {
    block += "# ";
    block += key;
    block += '=';
    block += value;
    block += '\n';
  }
  return block;
}

std::string version_string() { return INVASION_VERSION; }

}  // namespace invasion
