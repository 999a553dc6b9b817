#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sympen::cli {

enum ExitCode : int {
    kOk = 0,
    kNotConverged = 1,
    kUsage = 2,
    kIo = 3,
    kNumerical = 4,
};

// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "SYMPEIG_OUT";

// Fully resolved settings of one invocation: config file entries overlaid by
// command-line flags. Keys use underscores (`k_max`, `eps_decay`, ...).
struct RunConfig {
    std::string verb;
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const;
    std::string str(const std::string& key, const std::string& fallback = {}) const;
    double real(const std::string& key, double fallback) const;
    long integer(const std::string& key, long fallback) const;
    bool flag(const std::string& key) const;
    std::vector<std::string> list(const std::string& key, const std::string& fallback) const;
    std::filesystem::path out_dir() const;
};

// Parses a flat `key = value` file. Blank lines and `#` comments are ignored.
// Throws IoError when unreadable and ArgumentError on malformed lines.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sympen::cli
