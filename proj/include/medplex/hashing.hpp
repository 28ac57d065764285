#ifndef MEDPLEX_HASHING_HPP
#define MEDPLEX_HASHING_HPP

#include <filesystem>
#include <string>
#include <string_view>

namespace medplex {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

} // namespace medplex

#endif // MEDPLEX_HASHING_HPP
