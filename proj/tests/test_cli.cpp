#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "meshsort/cli.hpp"
#include "meshsort/io.hpp"

using namespace meshsort;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("meshsort-cli-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
  int code;
  std::string out, err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"track", "--help"}).code == 0);
  const Run bad = cli({"track", "--frobnicate"});
  CHECK(bad.code == 2);
  CHECK_FALSE(bad.err.empty());
  CHECK(cli({"teleport"}).code == 2);
  CHECK(cli({}).code == 2);
}

TEST_CASE("synth, track and eval end to end") {
  TempDir dir;
  REQUIRE(cli({"synth", "--preset", "crossing", "--seed", "3", "--out-gt", dir / "gt.txt", "--out-dets",
               dir / "dets.txt", "--out-scene", dir / "s.scene"})
              .code == 0);
  const Run t = cli({"track", "--dets", dir / "dets.txt", "--out", dir / "res.txt"});
  REQUIRE(t.code == 0);
  std::ifstream res(dir / "res.txt");
  const Trajectories parsed = parse_results(res, "res.txt");
  CHECK(parsed.size() >= 2);

  const Run e = cli({"eval", "--gt", dir / "gt.txt", "--res", dir / "res.txt", "--kv"});
  REQUIRE(e.code == 0);
  CHECK(e.out.find("MOTA=") != std::string::npos);
  CHECK(e.out.find("HOTA=") != std::string::npos);

  // Same input, same bytes.
  REQUIRE(cli({"track", "--dets", dir / "dets.txt", "--out", dir / "res2.txt"}).code == 0);
  CHECK(slurp(dir / "res.txt") == slurp(dir / "res2.txt"));

  REQUIRE(cli({"synth", "--scene", dir / "s.scene", "--out-gt", dir / "gt2.txt", "--out-dets", dir / "dets2.txt"})
              .code == 0);
  CHECK(slurp(dir / "dets2.txt") == slurp(dir / "dets.txt"));
}

TEST_CASE("config file and overrides") {
  TempDir dir;
  REQUIRE(cli({"synth", "--preset", "crowd", "--agents", "5", "--frames", "60", "--out-gt", dir / "gt.txt",
               "--out-dets", dir / "dets.txt"})
              .code == 0);
  std::ofstream(dir / "c.cfg") << "lm_buffer = 0\ndets = " << (dir / "dets.txt") << "\nout = " << (dir / "r.txt")
                               << "\n";
  CHECK(cli({"track", "--config", dir / "c.cfg"}).code == 0);
  CHECK(fs::exists(dir / "r.txt"));

  std::ofstream(dir / "bad.cfg") << "lm_bufer = 0\n";
  const Run bad = cli({"track", "--config", dir / "bad.cfg", "--dets", dir / "dets.txt", "--out", dir / "x.txt"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("lm_bufer") != std::string::npos);

  const Run missing = cli({"track", "--dets", dir / "nope.txt", "--out", dir / "x.txt"});
  CHECK(missing.code == 1);
}

TEST_CASE("ablate grid rows") {
  TempDir dir;
  REQUIRE(cli({"synth", "--preset", "crossing", "--out-gt", dir / "gt.txt", "--out-dets", dir / "dets.txt",
               "--out-scene", dir / "s.scene"})
              .code == 0);
  REQUIRE(cli({"ablate", "--grid", "lm_buffer=0,3", "--dets-or-scene", dir / "dets.txt", "--gt", dir / "gt.txt",
               "--out", dir / "t.txt"})
              .code == 0);
  const std::string table = slurp(dir / "t.txt");
  CHECK(line_count(table) == 3);
  CHECK(table.find("MOTA") != std::string::npos);

  REQUIRE(cli({"ablate", "--grid", "lm_buffer=0,3;mesh=2x2,4x4", "--dets-or-scene", dir / "s.scene", "--out",
               dir / "t2.txt"})
              .code == 0);
  CHECK(line_count(slurp(dir / "t2.txt")) == 5);

  CHECK(cli({"ablate", "--grid", "nonsense=1", "--dets-or-scene", dir / "s.scene", "--out", dir / "t3.txt"}).code ==
        1);
}

TEST_CASE("bench prints throughput") {
  const Run b = cli({"bench", "--agents", "5", "--frames", "50"});
  REQUIRE(b.code == 0);
  CHECK(b.out.find("fps=") != std::string::npos);
  CHECK(b.out.find("frames=50") != std::string::npos);
}
