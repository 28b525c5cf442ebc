#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "noonsim/io.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(NOONSIM_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("noonsim_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("exit codes") {
  TempDir tmp;
  CHECK(run("reproduce") == 0);
  CHECK(run("fringe --output " + (tmp / "f.csv")) == 0);
  CHECK(run("fringe --points 1 --output " + (tmp / "g.csv")) == 2);
  CHECK(run("fringe --scheme bogus --output " + (tmp / "g.csv")) == 2);
  CHECK(run("fringe --model multimode --sigma-p 1 --sigma-f 1 --quad-nodes 3 --output " +
            (tmp / "g.csv")) == 3);
  CHECK(run("fit --input " + (tmp / "missing.csv")) == 2);
  CHECK(run("nonsense") == 2);
}

TEST_CASE("counts are reproducible from the command line") {
  TempDir tmp;
  CHECK(run("counts --seed 12 --output " + (tmp / "a.csv")) == 0);
  CHECK(run("counts --seed 12 --output " + (tmp / "b.csv")) == 0);
  CHECK(run("counts --from " + (tmp / "a.csv") + " --output " + (tmp / "c.csv")) == 0);
  const auto a = noonsim::read_file(tmp / "a.csv");
  CHECK(a == noonsim::read_file(tmp / "b.csv"));
  CHECK(a == noonsim::read_file(tmp / "c.csv"));
  CHECK(run("fit --input " + (tmp / "a.csv") + " --output " + (tmp / "fit.json")) == 0);
  CHECK(fs::exists(tmp / "fit.json"));
}

TEST_CASE("config file with command-line override") {
  TempDir tmp;
  noonsim::write_file(tmp / "s.cfg", "scheme=noon\npoints=12\n");
  CHECK(run("fringe --config " + (tmp / "s.cfg") + " --points 9 --output " + (tmp / "f.csv")) == 0);
  const auto f = noonsim::parse_fringe_csv(noonsim::read_file(tmp / "f.csv"));
  CHECK(f.phases.size() == 9);
  noonsim::write_file(tmp / "bad.cfg", "scheme=noon\nwidth=3\n");
  CHECK(run("fringe --config " + (tmp / "bad.cfg")) == 2);
}

TEST_CASE("environment variable sets the default output directory") {
  TempDir tmp;
  const std::string cmd = "NOONSIM_OUTPUT_DIR=" + tmp.path.string() + " " + NOONSIM_EXE +
                          " fringe >/dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(tmp / "fringe.csv"));
}
