#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ergo::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 12345;

/// Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
enum ExitCode : int
{
    ok = 0,
    runtime_failure = 1,
    usage_error = 2,
};

/// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct ManifestEntry
{
    std::string path;
    std::string sha256;
};

struct ReplicateResult
{
    std::vector<ManifestEntry> files;
    std::filesystem::path manifest;
};

/// Writes fig1..fig5 (one CSV and one SVG each) and MANIFEST.txt into outdir.
ReplicateResult replicate(const std::filesystem::path& outdir, std::uint64_t seed,
                          unsigned threads, const std::string& command_line);

} // namespace ergo::cli
