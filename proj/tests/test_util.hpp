#ifndef ALCQM_TEST_UTIL_HPP_
#define ALCQM_TEST_UTIL_HPP_

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "alcqm/parser.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
  return std::string(ALCQM_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline alcqm::Ontology load_fixture(const std::string& name) {
  alcqm::ParseResult r = alcqm::parse(read_file(fixture_path(name)));
  if (!r.ok()) throw std::runtime_error("fixture " + name + " failed to parse");
  return std::move(*r.ontology);
}

struct ToolRun {
  int exit_code;
  std::string output;  // stdout and stderr combined
};

// Runs the CLI binary; arguments are shell-quoted by the caller.
inline ToolRun run_tool(const std::string& args) {
  std::string cmd = std::string(ALCQM_TOOL_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  int status = pclose(pipe);
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, out};
}

}  // namespace testutil

#endif  // ALCQM_TEST_UTIL_HPP_
