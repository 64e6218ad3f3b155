#include <filesystem>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "ldl/datagen.hpp"
#include "ldl/io.hpp"
#include "ldl/maxent.hpp"
#include "ldl/neighbors.hpp"
#include "ldl/neural.hpp"
#include "ldl/standardize.hpp"
#include "ldl/transform.hpp"

using namespace ldl;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an ldl::Error";
    return ErrorCode::IoError;
}

PredictorPtr round_trip(const Predictor& p) {
    std::stringstream buf;
    io::save_model(buf, p);
    return io::load_model(buf);
}

void expect_identical(const Predictor& a, const Predictor& b, const LdlDataset& probe) {
    EXPECT_EQ(a.algorithm(), b.algorithm());
    EXPECT_EQ(a.hyperparameters(), b.hyperparameters());
    for (std::size_t i = 0; i < probe.size(); ++i) {
        ASSERT_EQ(a.predict(probe.features(i)), b.predict(probe.features(i))) << i;
    }
}

}  // namespace

TEST(DatasetIo, RoundTripIsExact) {
    auto ds = datagen::sample_training(50, 3);
    ds.set_label_names({"red", "green", "blue"});
    std::stringstream buf;
    io::write_dataset(buf, ds);
    EXPECT_EQ(buf.str().substr(0, 6), "LDL 1\n");
    const auto back = io::read_dataset(buf);
    EXPECT_EQ(back, ds);
    EXPECT_EQ(back.label_names(), ds.label_names());
}

TEST(DatasetIo, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "ldl_io_roundtrip.ldl";
    const auto ds = datagen::sample_training(20, 4);
    io::write_dataset(path, ds);
    EXPECT_EQ(io::read_dataset(path), ds);
    std::filesystem::remove(path);
    try {
        io::read_dataset(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoError);
        EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
    }
}

TEST(DatasetIo, ShortRowReportsLine) {
    std::istringstream in("LDL 1\n2 1 3\n0.5 | 0.2 0.3 0.5\n0.1 | 0.5 0.5\n");
    try {
        io::read_dataset(in);
        FAIL();
    } catch (const io::FormatError& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        EXPECT_EQ(e.line(), 4u);
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
    }
}

TEST(DatasetIo, BadSumIsInvariantViolation) {
    std::istringstream in("LDL 1\n1 1 2\n0.5 | 0.4 0.5\n");
    try {
        io::read_dataset(in);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvariantViolation);
        EXPECT_NE(std::string(e.what()).find("BadSum"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(DatasetIo, MalformedInputs) {
    auto parse = [](const char* text) {
        return code_of([&] {
            std::istringstream in(text);
            io::read_dataset(in);
        });
    };
    EXPECT_EQ(parse("LDL 2\n1 1 2\n0 | 0.5 0.5\n"), ErrorCode::VersionMismatch);
    EXPECT_EQ(parse("XYZ 1\n"), ErrorCode::ParseError);
    EXPECT_EQ(parse("LDL 1\n2 1 2\n0 | 0.5 0.5\n"), ErrorCode::ParseError);
    EXPECT_EQ(parse("LDL 1\n1 1 2\nabc | 0.5 0.5\n"), ErrorCode::ParseError);
    EXPECT_EQ(parse("LDL 1\n1 1 2\n0 0.5 0.5\n"), ErrorCode::ParseError);
}

TEST(ModelIo, AllAlgorithmsRoundTrip) {
    const auto train = datagen::sample_training(120, 5);
    const auto probe = datagen::sample_training(60, 6);

    const auto iis = maxent::train_iis(train).model;
    const auto bfgs = maxent::train_bfgs(train).model;
    const auto knn = neighbors::fit(train, 5);
    neural::BpConfig bp_cfg;
    bp_cfg.epochs = 10;
    bp_cfg.hidden_units = 8;
    const auto bp = neural::train(train, bp_cfg).network;
    const auto bayes = transform::fit_pt_bayes(train, std::nullopt, 7);

    for (const Predictor* p : std::initializer_list<const Predictor*>{&iis, &bfgs, &knn, &bp, &bayes}) {
        SCOPED_TRACE(p->algorithm());
        const auto back = round_trip(*p);
        expect_identical(*p, *back, probe);
        // saving the loaded model reproduces the file byte for byte
        std::ostringstream a, b;
        io::save_model(a, *p);
        io::save_model(b, *back);
        EXPECT_EQ(a.str(), b.str());
    }
}

TEST(ModelIo, StandardizedWrapperRoundTrips) {
    const auto train = datagen::sample_training(80, 8);
    const auto s = Standardizer::fit(train);
    const StandardizedPredictor p(s, std::make_unique<neighbors::KnnModel>(neighbors::fit(s.apply(train), 3)));
    const auto back = round_trip(p);
    expect_identical(p, *back, datagen::sample_training(30, 9));
    EXPECT_EQ(back->hyperparameters().at("standardize"), "true");
}

TEST(ModelIo, CorruptHeaders) {
    const auto model = maxent::train_bfgs(datagen::sample_training(40, 10)).model;
    std::ostringstream buf;
    io::save_model(buf, model);
    const std::string text = buf.str();

    std::string tag = text;
    tag.replace(tag.find("sa-bfgs"), 7, "sa-xxxx");
    EXPECT_EQ(code_of([&] {
                  std::istringstream in(tag);
                  io::load_model(in);
              }),
              ErrorCode::UnknownAlgorithmTag);

    std::string version = text;
    version.replace(0, 10, "LDLMODEL 9");
    EXPECT_EQ(code_of([&] {
                  std::istringstream in(version);
                  io::load_model(in);
              }),
              ErrorCode::VersionMismatch);

    EXPECT_EQ(code_of([&] {
                  std::istringstream in(text.substr(0, text.size() / 2));
                  io::load_model(in);
              }),
              ErrorCode::ParseError);
}
