#pragma once

#include <string>
#include <utility>
#include <vector>

namespace invasion {

// %.17g: doubles round-trip exactly, so reruns can be diffed byte for byte
std::string format_g17(double v);

// Writes to a sibling temp file, then renames over the target, so a crash
// or interrupt never leaves a partially written output behind.
void write_file_atomic(const std::string& path, const std::string& content);

// "# key=value" lines prepended to every emitted file
std::string metadata_block(const std::vector<std::pair<std::string, std::string>>& kv);

// git describe captured at configure time; "unversioned" outside a checkout
std::string version_string();

}  // namespace invasion
