#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "program_gen.hpp"
#include "sg/cli.hpp"
#include "sg/compiler.hpp"
#include "sg/template.hpp"

namespace support {

inline std::filesystem::path data_dir() { return SG_DEFAULT_DATA_DIR; }

inline std::filesystem::path example(const std::string& name) {
  return std::filesystem::path(SG_EXAMPLES_DIR) / name;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline const sg::Vocabulary& vocab() { return gen::vocab(); }

inline sg::CompiledScene compile(const std::string& text) { return sg::compile_text(text, vocab()); }

inline const sg::SceneTemplate& living_room() {
  static const sg::SceneTemplate t = sg::find_template("living_room", data_dir(), vocab());
  return t;
}

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

inline Run sgc(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = sg::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("sg_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace support
