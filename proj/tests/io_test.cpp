#include "ddsel/io.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

namespace ddsel {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ddsel_io_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  fs::path dir_;
};

TEST_F(IoTest, CsvRoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  Matrix m = testing::gaussian_matrix(rng, 7, 4);
  m(0, 0) = 1e-300;
  m(1, 1) = -0.1;
  write_matrix_csv(path("m.csv"), m);
  EXPECT_TRUE(read_matrix_csv(path("m.csv")) == m);
  const Vector v = testing::gaussian_vector(rng, 9);
  write_vector_csv(path("v.csv"), v);
  EXPECT_TRUE(read_vector_csv(path("v.csv")) == v);
}

TEST_F(IoTest, ReadsRowVectorsAndSkipsBlankLines) {
  write("row.csv", "1, 2 ,3\n\n");
  EXPECT_EQ(read_vector_csv(path("row.csv")), (Vector(3) << 1, 2, 3).finished());
}

TEST_F(IoTest, MalformedInputs) {
  auto code_of = [&](const std::string& name) {
    try {
      read_matrix_csv(path(name));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  write("ragged.csv", "1,2\n3\n");
  write("text.csv", "1,abc\n");
  write("empty.csv", "\n");
  EXPECT_EQ(code_of("ragged.csv"), ErrorCode::kMalformedProblem);
  EXPECT_EQ(code_of("text.csv"), ErrorCode::kMalformedProblem);
  EXPECT_EQ(code_of("empty.csv"), ErrorCode::kMalformedProblem);
  EXPECT_EQ(code_of("missing.csv"), ErrorCode::kIo);
  write("wide.csv", "1,2\n3,4\n");
  EXPECT_THROW(read_vector_csv(path("wide.csv")), Error);
}

TEST_F(IoTest, BoundSetJsonRoundTrip) {
  BoundSet b;
  b.coef_upper = (Vector(3) << 1.5, 0.25, 3.0).finished();
  b.pred_upper = (Vector(2) << 0.1, 7.0).finished();
  b.l1_coef = 4.0;
  b.l1_pred = 5.5;
  b.global_coef = 3.0;
  b.provenance = BoundProvenance::kWarmStartDerived;
  b.flags = {"guarded_pred_l1"};
  write_json(path("b.json"), to_json(b));
  const BoundSet r = bounds_from_json(read_json(path("b.json")));
  EXPECT_TRUE(r.coef_upper == b.coef_upper);
  EXPECT_TRUE(r.pred_upper == b.pred_upper);
  EXPECT_EQ(r.l1_coef, b.l1_coef);
  EXPECT_EQ(r.l1_pred, b.l1_pred);
  EXPECT_EQ(r.global_coef, b.global_coef);
  EXPECT_EQ(r.provenance, b.provenance);
  EXPECT_EQ(r.flags, b.flags);
}

TEST_F(IoTest, BoundSetJsonIsValidated) {
  Json j = to_json(BoundSet{Vector::Ones(2), Vector::Ones(2), 2.0, 2.0, 1.0, BoundProvenance::kLpDerived, {}});
  EXPECT_NO_THROW(bounds_from_json(j));
  j["global_coef"] = 5.0;
  EXPECT_THROW(bounds_from_json(j), Error);
  j.erase("coef_upper");
  try {
    bounds_from_json(j);
    FAIL() << "expected MalformedProblem";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedProblem);
  }
  write("bad.json", "{ not json");
  EXPECT_THROW(read_json(path("bad.json")), Error);
}

TEST_F(IoTest, SolutionJsonUsesOneBasedSupport) {
  const ProblemData prob(Matrix::Identity(3, 3), (Vector(3) << 0.0, 2.0, 0.0).finished(), 0.5);
  const Solution s = Solution::from_beta(prob, (Vector(3) << 0.0, 2.0, 0.0).finished());
  const Json j = to_json(s);
  EXPECT_EQ(j["support"], Json::array({2}));
  EXPECT_EQ(j["objective"], 1);
  EXPECT_EQ(j["beta"].get<std::vector<double>>(), (std::vector<double>{0.0, 2.0, 0.0}));
}

TEST_F(IoTest, PathCsvLongFormat) {
  const ProblemData prob(Matrix::Identity(3, 3), (Vector(3) << 3.0, -2.0, 0.1).finished());
  PathResult r;
  r.grid = {1.0};
  PathPoint pt;
  pt.delta = 1.0;
  pt.solution = Solution::from_beta(prob.with_delta(1.0), (Vector(3) << 2.0, -1.0, 0.0).finished());
  r.points.push_back(pt);
  write_path_csv(path("p.csv"), r);
  std::ifstream in(path("p.csv"));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text, "delta,index,value\n1,1,2\n1,2,-1\n");
}

}  // namespace
}  // namespace ddsel
