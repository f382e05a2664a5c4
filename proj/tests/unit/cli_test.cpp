#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "acc2dc/cli.hpp"
#include "acc2dc/config.hpp"
#include "fixtures.hpp"

using namespace acc2dc;
using namespace acc2dc::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("acc2dc_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string &name) const { return (path_ / name).string(); }

private:
  fs::path path_;
};

void write(const std::string &path, const std::string &text) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

} // namespace

TEST(Cli, LaunchScriptToStdout) {
  auto r = cli({"launch-script", "--mpi", "openmpi"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, generate_launch_script(MpiFlavor::OpenMPI));
}

TEST(Cli, LaunchScriptFileIsExecutable) {
  TempDir dir;
  auto r = cli({"launch-script", "--mpi", "mpich", "--out", dir / "launch.sh"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_text(dir / "launch.sh"), generate_launch_script(MpiFlavor::MPICH));
  auto perms = fs::status(dir / "launch.sh").permissions();
  EXPECT_NE(perms & fs::perms::owner_exec, fs::perms::none);
}

TEST(Cli, UnknownFlavorIsAnError) {
  auto r = cli({"launch-script", "--mpi", "pbs"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, AnalyzeEmptyFile) {
  TempDir dir;
  write(dir / "empty.f90", "");
  auto r = cli({"analyze", dir / "empty.f90"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"total\": 0"), std::string::npos);
}

TEST(Cli, AnalyzeReportsRegions) {
  auto r = cli({"analyze", data_path("fixtures/reference/atomic_reduction.f90")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ArrayReductionAtomic"), std::string::npos);
  EXPECT_NE(r.out.find("\"parallel_loop\": 3"), std::string::npos);
}

TEST(Cli, TransformDirectoryToZeroDirectives) {
  TempDir dir;
  auto r = cli({"transform", "--mode", "d2xu", "--config", data_path("corpus/acc2dc.cfg"), "--out", dir / "out",
                data_path("corpus")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t files = 0;
  for (const auto &e : fs::directory_iterator(dir / "out"))
    if (e.path().extension() == ".f90") {
      ++files;
      EXPECT_EQ(read_text(e.path().string()).find("!$acc"), std::string::npos) << e.path();
    }
  EXPECT_EQ(files, corpus_files().size());
  auto report = read_text(dir / "out/acc2dc_report.json");
  EXPECT_NE(report.find("\"acc_lines\": 0"), std::string::npos);
}

TEST(Cli, StrictModeExitCode) {
  TempDir dir;
  write(dir / "in/u.f90", "subroutine s(n, t)\n  integer :: n, i\n  real(8) :: t(n)\n!$acc parallel loop\n"
                          "do i=1,n\n  t(i) = g(t)\nenddo\nend subroutine s\n");
  auto lenient = cli({"transform", "--mode", "d2xu", "--out", dir / "a", dir / "in/u.f90"});
  EXPECT_EQ(lenient.code, 0) << lenient.err;
  auto strict = cli({"transform", "--mode", "d2xu", "--strict", "--out", dir / "b", dir / "in/u.f90"});
  EXPECT_EQ(strict.code, 1);
  // No ActionRequired: strict still succeeds.
  auto clean = cli({"transform", "--mode", "ad", "--strict", "--out", dir / "c",
                    data_path("fixtures/reference/collapse_nest.f90")});
  EXPECT_EQ(clean.code, 0) << clean.err;
}

TEST(Cli, ParseErrorsAreLineAddressed) {
  TempDir dir;
  write(dir / "bad.f90", "x = 1\n!$acc parallel\ny = 2\n");
  auto r = cli({"transform", "--mode", "ad", "--out", dir / "o", dir / "bad.f90"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.f90:2:"), std::string::npos) << r.err;
}

TEST(Cli, MissingInputAndUnknownMode) {
  EXPECT_EQ(cli({"analyze", "/nonexistent/file.f90"}).code, 2);
  EXPECT_EQ(cli({"transform", "--mode", "zz", "--out", "/tmp/x", data_path("corpus")}).code, 2);
  EXPECT_EQ(cli({"bogus"}).code, 2);
}

TEST(Cli, RefusesToWriteIntoInputTree) {
  TempDir dir;
  write(dir / "in/a.f90", read_text(data_path("fixtures/reference/collapse_nest.f90")));
  auto r = cli({"transform", "--mode", "ad", "--out", dir / "in", dir / "in/a.f90"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(read_text(dir / "in/a.f90"), read_text(data_path("fixtures/reference/collapse_nest.f90")));
}

TEST(Cli, ReportIsDeterministic) {
  std::vector<std::string> args{"report", "--config", data_path("corpus/acc2dc.cfg"), data_path("corpus")};
  auto a = cli(args);
  auto b = cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto table = cli({"report", "--format", "table", "--mode", "a,d2xu", data_path("fixtures/reference")});
  EXPECT_EQ(table.code, 0) << table.err;
  EXPECT_NE(table.out.find("5: D2XU"), std::string::npos);
  EXPECT_EQ(table.out.find("2: AD "), std::string::npos);
}

TEST(Cli, ConfigErrorsNameTheLine) {
  TempDir dir;
  write(dir / "c.cfg", "mode = ad\nfoo = 1\n");
  auto r = cli({"analyze", "--config", dir / "c.cfg", data_path("fixtures/reference/collapse_nest.f90")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST(Cli, BinaryRuns) {
  // The installed executable behaves like the in-process entry point.
  auto cmd = cli_path() + " launch-script --mpi openmpi > /dev/null";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
}
