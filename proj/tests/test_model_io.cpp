#include <doctest.h>

#include <random>

#include "diagq/model_io.hpp"
#include "test_support.hpp"

using namespace diagq::data;
using namespace diagq::models;

namespace {

ResponseMatrix small_matrix(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ResponseRecord> records;
  Id answer = 0;
  for (Id s = 0; s < 12; ++s) {
    for (Id q = 0; q < 7; ++q) {
      if (rng() % 4 == 0) continue;
      int correct = static_cast<int>(rng() % 4) + 1;
      int value = rng() % 2 == 0 ? correct : static_cast<int>(rng() % 4) + 1;
      records.push_back(ResponseRecord{q, s, answer++, value, correct,
                                       value == correct ? 1 : 0});
    }
  }
  return ResponseMatrix::from_records(records);
}

}  // namespace

TEST_CASE("majority checkpoint round-trip") {
  testsupport::TempDir dir;
  auto matrix = small_matrix(1);
  auto model = MajorityModel::fit(matrix);
  auto path = dir.file("model_task_4_majority.bin");
  save_model(path, model);
  CHECK(peek_model_kind(path) == ModelKind::majority);
  auto loaded = load_majority(path);
  for (Id q = 0; q < 7; ++q) {
    CHECK(loaded.predict_binary(q) == model.predict_binary(q));
    CHECK(loaded.predict_choice(q) == model.predict_choice(q));
    CHECK(loaded.prob_correct(0, q) == model.prob_correct(0, q));
  }
  CHECK(loaded.predict_binary(999) == model.predict_binary(999));
}

TEST_CASE("irt checkpoint round-trip") {
  testsupport::TempDir dir;
  auto matrix = small_matrix(2);
  IrtConfig config;
  config.epochs = 30;
  auto model = IrtModel::fit(matrix, config);
  auto path = dir.file("model_task_4_irt.bin");
  save_model(path, model);
  CHECK(peek_model_kind(path) == ModelKind::irt);
  auto loaded = load_irt(path);
  CHECK(loaded.kind() == model.kind());
  for (Id s = 0; s < 12; ++s) {
    for (Id q = 0; q < 7; ++q) {
      CHECK(loaded.predict(s, q) == model.predict(s, q));
    }
  }
}

TEST_CASE("mf checkpoint round-trip in both modes") {
  testsupport::TempDir dir;
  auto matrix = small_matrix(3);
  for (PredictionMode mode : {PredictionMode::binary, PredictionMode::categorical}) {
    MfConfig config;
    config.mode = mode;
    config.k = 2;
    config.epochs = 15;
    auto model = MfModel::fit(matrix, config);
    auto path = dir.file("model_task_4_mf.bin");
    save_model(path, model);
    auto loaded = load_mf(path);
    CHECK(loaded.mode() == mode);
    if (mode == PredictionMode::binary) {
      CHECK(loaded.prob_correct(0, 0) == model.prob_correct(0, 0));
    } else {
      CHECK(loaded.choice_distribution(0, 0) == model.choice_distribution(0, 0));
    }
  }
}

TEST_CASE("load_predictor dispatches on the stored kind") {
  testsupport::TempDir dir;
  auto matrix = small_matrix(4);
  auto model = MajorityModel::fit(matrix);
  auto path = dir.file("model_task_4_any.bin");
  save_model(path, model);
  auto predictor = load_predictor(path);
  CHECK(predictor->supports(PredictionMode::binary));
  CHECK(predictor->prob_correct(0, 0) == model.prob_correct(0, 0));
}

TEST_CASE("checkpoint loading rejects corrupt and mismatched files") {
  testsupport::TempDir dir;
  auto bad_magic = dir.file("bad.bin");
  testsupport::write_text(bad_magic, "NOTMODEL-----------");
  CHECK_THROWS_WITH_AS(peek_model_kind(bad_magic), doctest::Contains("magic"),
                       std::runtime_error);

  auto matrix = small_matrix(5);
  auto majority_path = dir.file("model_task_4_m.bin");
  save_model(majority_path, MajorityModel::fit(matrix));
  CHECK_THROWS_AS(load_irt(majority_path), std::runtime_error);

  auto truncated = dir.file("model_task_4_t.bin");
  auto bytes = testsupport::read_text(majority_path);
  testsupport::write_text(truncated, bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(load_majority(truncated), std::runtime_error);

  CHECK_THROWS_AS(peek_model_kind(dir.file("absent.bin")), std::runtime_error);
}
