#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("powerloc_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Result run(const std::string& args) const {
        const std::string cmd = "cd '" + dir_.string() + "' && '" POWERLOC_CLI "' " + args +
                                " > stdout.txt 2> stderr.txt";
        Result r;
        const int status = std::system(cmd.c_str());
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = read("stdout.txt");
        r.err = read("stderr.txt");
        return r;
    }

    std::string read(const std::string& name) const {
        std::ifstream in(dir_ / name);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream(dir_ / name) << text;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpListsSubcommands) {
    const auto r = run("--help");
    EXPECT_EQ(r.code, 0);
    for (const char* sub : {"gen", "preprocess", "dist", "classify", "xval", "track", "infer", "report"}) {
        EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
    }
}

TEST_F(Cli, UsageErrorsExitTwoWithJsonLine) {
    const auto r = run("--out o dist");
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.err.rfind("{\"error\":\"usage\"", 0), 0u) << r.err;
    EXPECT_EQ(run("--out o frobnicate").code, 2);
}

TEST_F(Cli, ErrorKindsHaveDistinctExitCodes) {
    write("bad_config.json", R"({"tracker": {"bogus": 1}})");
    const auto config = run("--config bad_config.json --out o gen world");
    EXPECT_EQ(config.code, 2);
    EXPECT_NE(config.err.find("\"config\""), std::string::npos);

    const auto missing = run("--out o preprocess --trace nope.csv");
    EXPECT_EQ(missing.code, 3);
    EXPECT_NE(missing.err.find("missing_file"), std::string::npos);

    write("broken.csv", "t_s,power_mw\n0,1\n0.1,x\n");
    const auto format = run("--out o preprocess --trace broken.csv");
    EXPECT_EQ(format.code, 4);
    EXPECT_NE(format.err.find("\"format\""), std::string::npos);

    ASSERT_EQ(run("--out w gen world --fixture tiny4").code, 0);
    ASSERT_EQ(run("--out d gen drive --world w/world.json --route 1-2-3").code, 0);
    fs::create_directories(dir_ / "empty_lib" / "segments");
    const auto coverage =
        run("--out i infer --observation d/drive.csv --world w/world.json --library empty_lib --start 1");
    EXPECT_EQ(coverage.code, 5) << coverage.err;
    EXPECT_NE(coverage.err.find("coverage"), std::string::npos);
}

TEST_F(Cli, SinglePathInferencePrintsTheOnlyRoute) {
    ASSERT_EQ(run("--out w gen world --fixture single_path").code, 0);
    ASSERT_EQ(run("--out l gen library --world w/world.json").code, 0);
    ASSERT_EQ(run("--out d gen drive --world w/world.json --route 1-2-3-4").code, 0);
    const auto r = run("--out i infer --observation d/drive.csv --world w/world.json --library l/library "
                       "--start 1 --particles 50");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "frequent 1-2-3-4\nimv 1-2-3-4\n");
    EXPECT_EQ(read("i/p_final.csv"), "route,count,probability\n1-2-3-4,50,1\n");
}

TEST_F(Cli, FlagsOverrideTheConfigSeed) {
    write("seeded.json", R"({"seed": 5})");
    ASSERT_EQ(run("--out a gen world --fixture tiny4 --seed 5").code, 0);
    ASSERT_EQ(run("--config seeded.json --out b gen world --fixture tiny4").code, 0);
    ASSERT_EQ(run("--config seeded.json --out c gen world --fixture tiny4 --seed 6").code, 0);
    EXPECT_EQ(read("a/world.json"), read("b/world.json"));
    EXPECT_NE(read("a/world.json"), read("c/world.json"));
}

TEST_F(Cli, InputsAreNotModified) {
    ASSERT_EQ(run("--out w gen world --fixture tiny4").code, 0);
    ASSERT_EQ(run("--out d gen drive --world w/world.json --route 1-2-3").code, 0);
    const auto before = read("d/drive.csv");
    ASSERT_EQ(run("--out p preprocess --trace d/drive.csv --stage tracker").code, 0);
    EXPECT_EQ(read("d/drive.csv"), before);
    EXPECT_NE(read("p/preprocessed.csv"), before);
}
