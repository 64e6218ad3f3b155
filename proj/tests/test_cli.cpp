#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string output;  // stdout and stderr interleaved
};

Run run(const std::string& args) {
    const std::string cmd = std::string(LDL_CLI_PATH) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) r.output.append(buf.data(), got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = fs::temp_directory_path() / ("ldl_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
        const auto r = run("synth --n 120 --seed 1 --out " + path("train.ldl") + " --test-out " +
                           path("grid.ldl"));
        ASSERT_EQ(r.status, 0) << r.output;
    }
    static void TearDownTestSuite() { fs::remove_all(dir_); }
    static std::string path(const std::string& name) { return (dir_ / name).string(); }

    static fs::path dir_;
};

fs::path Cli::dir_;

}  // namespace

TEST_F(Cli, SynthWritesBothFiles) {
    const auto r = run("synth --n 500 --seed 3 --out " + path("s.ldl"));
    ASSERT_EQ(r.status, 0) << r.output;
    std::istringstream in(slurp(path("s.ldl")));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "LDL 1");
    std::getline(in, line);
    EXPECT_EQ(line, "500 3 3");
    std::istringstream grid(slurp(path("grid.ldl")));
    std::size_t rows = 0;
    while (std::getline(grid, line)) rows += contains(line, "|");
    EXPECT_EQ(rows, 40401u);
}

TEST_F(Cli, SynthIsDeterministic) {
    ASSERT_EQ(run("synth --n 30 --seed 9 --out " + path("a.ldl")).status, 0);
    ASSERT_EQ(run("synth --n 30 --seed 9 --out " + path("b.ldl")).status, 0);
    EXPECT_EQ(slurp(path("a.ldl")), slurp(path("b.ldl")));
}

TEST_F(Cli, UnwritablePathNamesThePath) {
    const auto r = run("synth --out /nonexistent-dir/x.ldl");
    EXPECT_NE(r.status, 0);
    EXPECT_TRUE(contains(r.output, "/nonexistent-dir/x.ldl")) << r.output;
}

TEST_F(Cli, TrainEvalRoundTrip) {
    auto r = run("train --algo sa-bfgs --data " + path("train.ldl") + " --model-out " + path("m.model") +
                 " --trace-out " + path("trace.csv"));
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_TRUE(contains(r.output, "sa-bfgs"));
    EXPECT_EQ(slurp(path("trace.csv")).substr(0, 34), "iteration,T,grad_norm,alpha,millis");

    r = run("eval --model " + path("m.model") + " --data " + path("train.ldl") + " --report " +
            path("eval.csv"));
    ASSERT_EQ(r.status, 0) << r.output;
    for (const char* m : {"Chebyshev", "Clark", "Canberra", "Kullback-Leibler", "Cosine", "Intersection"}) {
        EXPECT_TRUE(contains(r.output, m)) << m;
    }
    EXPECT_TRUE(contains(slurp(path("eval.csv")), "Chebyshev"));
}

TEST_F(Cli, TrainEveryAlgorithm) {
    for (const char* algo : {"pt-bayes", "aa-knn", "aa-bp", "sa-iis"}) {
        const auto r = run(std::string("train --algo ") + algo + " --epochs 20 --data " + path("train.ldl") +
                           " --model-out " + path(std::string(algo) + ".model"));
        EXPECT_EQ(r.status, 0) << algo << "\n" << r.output;
    }
}

TEST_F(Cli, UnknownAlgorithmIsUsageError) {
    const auto r = run("train --algo svm --data " + path("train.ldl"));
    EXPECT_EQ(r.status, 1) << r.output;
    EXPECT_EQ(run("frobnicate").status, 1);
}

TEST_F(Cli, LabelCountMismatchIsDataError) {
    {
        std::ofstream out(path("four.ldl"));
        out << "LDL 1\n2 3 4\n0 0 0 | 0.25 0.25 0.25 0.25\n1 1 1 | 0.1 0.2 0.3 0.4\n";
    }
    ASSERT_EQ(run("train --algo aa-knn --k 1 --data " + path("train.ldl") + " --model-out " + path("k.model")).status, 0);
    const auto r = run("eval --model " + path("k.model") + " --data " + path("four.ldl"));
    EXPECT_EQ(r.status, 2) << r.output;
    EXPECT_TRUE(contains(r.output, "DimensionMismatch")) << r.output;

    ASSERT_EQ(run("train --algo aa-knn --k 1 --data " + path("four.ldl") + " --model-out " + path("k4.model")).status, 0);
    const auto render = run("render --model " + path("k4.model") + " --out " + path("x.ppm"));
    EXPECT_EQ(render.status, 2) << render.output;
}

TEST_F(Cli, MalformedDataIsDataError) {
    {
        std::ofstream out(path("bad.ldl"));
        out << "LDL 1\n1 1 3\n0.5 | 0.2 0.3\n";
    }
    const auto r = run("train --algo aa-knn --data " + path("bad.ldl"));
    EXPECT_EQ(r.status, 2) << r.output;
    EXPECT_TRUE(contains(r.output, "line 3")) << r.output;
}

TEST_F(Cli, RenderGroundTruthIsDeterministic) {
    ASSERT_EQ(run("render --ground-truth --out " + path("gt1.ppm")).status, 0);
    ASSERT_EQ(run("render --ground-truth --out " + path("gt2.ppm")).status, 0);
    const auto a = slurp(path("gt1.ppm"));
    EXPECT_EQ(a, slurp(path("gt2.ppm")));
    EXPECT_EQ(a.substr(0, 15), "P6\n201 201\n255\n");
    EXPECT_EQ(a.size(), 15u + 40401u * 3);
    ASSERT_EQ(run("render --ground-truth --stretch --out " + path("gt3.ppm")).status, 0);
    EXPECT_NE(slurp(path("gt3.ppm")), a);
}

TEST_F(Cli, RenderModel) {
    ASSERT_EQ(run("train --algo sa-iis --data " + path("train.ldl") + " --model-out " + path("iis.model")).status, 0);
    const auto r = run("render --model " + path("iis.model") + " --out " + path("iis.ppm"));
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(slurp(path("iis.ppm")).size(), 15u + 40401u * 3);
    EXPECT_EQ(run("render --out " + path("none.ppm")).status, 1);
}

TEST_F(Cli, CvIsDeterministicAndRanks) {
    const std::string args = "cv --data " + path("train.ldl") +
                             " --algos aa-knn,sa-bfgs,pt-bayes --folds 5 --seed 2 --report ";
    const auto a = run(args + path("cv1.csv") + " --text-out " + path("cv1.txt"));
    ASSERT_EQ(a.status, 0) << a.output;
    const auto b = run(args + path("cv2.csv"));
    ASSERT_EQ(b.status, 0) << b.output;
    EXPECT_EQ(slurp(path("cv1.csv")), slurp(path("cv2.csv")));
    EXPECT_TRUE(contains(a.output, "Avg. Rank")) << a.output;
    EXPECT_TRUE(contains(slurp(path("cv1.txt")), "Avg. Rank"));
    for (const char* algo : {"aa-knn", "sa-bfgs", "pt-bayes"}) EXPECT_TRUE(contains(a.output, algo));
    EXPECT_TRUE(contains(slurp(path("cv1.csv")), "# seed"));
}

TEST_F(Cli, CvTooFewExamples) {
    {
        std::ofstream out(path("tiny.ldl"));
        out << "LDL 1\n2 1 2\n0 | 0.5 0.5\n1 | 0.2 0.8\n";
    }
    const auto r = run("cv --data " + path("tiny.ldl") + " --algos aa-knn --folds 5");
    EXPECT_EQ(r.status, 2) << r.output;
    EXPECT_TRUE(contains(r.output, "TooFewExamples")) << r.output;
}
