#pragma once

#include <cstdint>
#include <string>

namespace narmine::sha256 {

// Lowercase hex digest.
std::string hex_digest(const void* data, std::size_t len);
std::string hex_digest(const std::string& data);
std::string file_digest(const std::string& path);

}  // namespace narmine::sha256
