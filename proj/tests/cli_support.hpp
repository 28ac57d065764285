#ifndef MEDPLEX_TEST_CLI_SUPPORT_HPP
#define MEDPLEX_TEST_CLI_SUPPORT_HPP

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

namespace cli {

inline std::string quote(const std::filesystem::path& p) {
    return "'" + p.string() + "'";
}

/// Runs the CLI with `args` and returns its exit status; stderr goes to `log` when given.
inline int run(const std::string& args, const std::filesystem::path& log = {}) {
    std::string cmd = std::string("'") + MEDPLEX_CLI_PATH + "' " + args;
    cmd += log.empty() ? " 2>/dev/null" : " 2>" + quote(log);
    cmd += " >/dev/null";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

} // namespace cli

#endif // MEDPLEX_TEST_CLI_SUPPORT_HPP
