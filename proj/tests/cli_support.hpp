#pragma once

// Drives the command-line binary as a subprocess and captures its streams.
// RESPO_CLI_PATH and RESPO_DATA_DIR are injected by the build.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace clisupport {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::filesystem::path scratch_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("respo-cli-" + std::to_string(static_cast<long>(::getpid())));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::filesystem::path write_file(const std::string& name, const std::string& content) {
  const auto p = scratch_dir() / name;
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
  return p;
}

inline RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const auto out_path = scratch_dir() / ("stdout-" + std::to_string(counter));
  const auto err_path = scratch_dir() / ("stderr-" + std::to_string(counter));
  ++counter;
  const std::string cmd = std::string("\"") + RESPO_CLI_PATH + "\" " + args + " >\"" +
                          out_path.string() + "\" 2>\"" + err_path.string() + "\"";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out_path);
  r.err = read_file(err_path);
  return r;
}

inline std::string data_path(const std::string& name) {
  return std::string(RESPO_DATA_DIR) + "/" + name;
}

}  // namespace clisupport
