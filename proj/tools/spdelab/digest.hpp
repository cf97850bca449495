#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace spdelab::cli {

/// Git blob object id: hex SHA-1 of "blob <size>\0" followed by the bytes.
std::string git_blob_sha1(std::string_view bytes);
std::string git_blob_sha1_file(const std::filesystem::path& path);

}  // namespace spdelab::cli
