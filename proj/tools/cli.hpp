#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scatterlab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs one command line. Returns 0 on success, 2 for configuration errors,
/// 3 for numerical failures. Results go to `out` unless --output is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Git blob hash of a byte string: sha1("blob <size>\0" + bytes), hex.
std::string git_blob_hash(const std::string& bytes);

}  // namespace scatterlab::cli
