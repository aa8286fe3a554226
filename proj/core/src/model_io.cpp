#include "diagq/model_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace diagq::models {

namespace {

constexpr char kMagic[8] = {'D', 'I', 'A', 'G', 'Q', 'M', 'D', 'L'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), tmp_(path) {
    tmp_ += ".tmp";
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open file for writing: " + tmp_.string());
  }

  void u32(std::uint32_t v) { raw(&v, sizeof(v)); }
  void u64(std::uint64_t v) { raw(&v, sizeof(v)); }
  void i64(std::int64_t v) { raw(&v, sizeof(v)); }
  void f64(double v) { raw(&v, sizeof(v)); }

  void ids(const std::vector<data::Id>& v) {
    u64(v.size());
    for (auto x : v) i64(x);
  }
  void doubles(const std::vector<double>& v) {
    u64(v.size());
    for (auto x : v) f64(x);
  }

  void raw(const void* data, std::size_t size) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  }

  void finish() {
    out_.flush();
    if (!out_) {
      throw std::runtime_error("write failed: " + tmp_.string());
    }
    out_.close();
    std::filesystem::rename(tmp_, path_);
  }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open model file: " + path.string());
  }

  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  std::int64_t i64() { return get<std::int64_t>(); }
  double f64() { return get<double>(); }

  std::vector<data::Id> ids() {
    auto n = u64();
    std::vector<data::Id> v(n);
    for (auto& x : v) x = i64();
    return v;
  }
  std::vector<double> doubles() {
    auto n = u64();
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }

  void raw(void* data, std::size_t size) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (!in_) throw std::runtime_error("truncated model file");
  }

 private:
  template <class T>
  T get() {
    T v;
    raw(&v, sizeof(v));
    return v;
  }

  std::ifstream in_;
};

void write_header(Writer& w, ModelKind kind) {
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(kind));
}

ModelKind read_header(Reader& r) {
  char magic[8];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a model checkpoint (bad magic)");
  }
  std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw std::runtime_error("unsupported checkpoint schema version " + std::to_string(version));
  }
  std::uint32_t kind = r.u32();
  if (kind < 1 || kind > 3) {
    throw std::runtime_error("unknown model kind " + std::to_string(kind));
  }
  return static_cast<ModelKind>(kind);
}

void expect_kind(ModelKind actual, ModelKind wanted) {
  if (actual != wanted) throw std::runtime_error("checkpoint holds a different model kind");
}

}  // namespace

void save_model(const std::filesystem::path& path, const MajorityModel& model) {
  Writer w(path);
  write_header(w, ModelKind::majority);
  auto write_stats = [&w](const MajorityModel::QuestionStats& s) {
    w.i64(s.n);
    w.i64(s.n_correct);
    for (auto c : s.choice_counts) w.i64(c);
  };
  write_stats(model.global_stats());
  // Sorted for byte-identical checkpoints across runs.
  std::vector<data::Id> ids;
  ids.reserve(model.question_stats().size());
  for (const auto& [id, _] : model.question_stats()) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  w.u64(ids.size());
  for (data::Id id : ids) {
    w.i64(id);
    write_stats(model.question_stats().at(id));
  }
  w.finish();
}

MajorityModel load_majority(const std::filesystem::path& path) {
  Reader r(path);
  expect_kind(read_header(r), ModelKind::majority);
  auto read_stats = [&r] {
    MajorityModel::QuestionStats s;
    s.n = r.i64();
    s.n_correct = r.i64();
    for (auto& c : s.choice_counts) c = r.i64();
    return s;
  };
  MajorityModel::QuestionStats global = read_stats();
  std::uint64_t count = r.u64();
  std::unordered_map<data::Id, MajorityModel::QuestionStats> stats;
  stats.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    data::Id id = r.i64();
    stats[id] = read_stats();
  }
  return MajorityModel::from_stats(std::move(stats), global);
}

void save_model(const std::filesystem::path& path, const IrtModel& model) {
  Writer w(path);
  write_header(w, ModelKind::irt);
  w.u32(model.kind() == IrtKind::one_pl ? 1u : 2u);
  w.ids(model.student_ids());
  w.doubles(model.theta());
  w.ids(model.question_ids());
  w.doubles(model.b());
  w.doubles(model.a());
  w.finish();
}

IrtModel load_irt(const std::filesystem::path& path) {
  Reader r(path);
  expect_kind(read_header(r), ModelKind::irt);
  IrtKind kind = r.u32() == 1u ? IrtKind::one_pl : IrtKind::two_pl;
  auto student_ids = r.ids();
  auto theta = r.doubles();
  auto question_ids = r.ids();
  auto b = r.doubles();
  auto a = r.doubles();
  return IrtModel::from_parameters(kind, std::move(student_ids), std::move(theta),
                                   std::move(question_ids), std::move(b), std::move(a));
}

void save_model(const std::filesystem::path& path, const MfModel& model) {
  Writer w(path);
  write_header(w, ModelKind::mf);
  w.u32(model.mode() == PredictionMode::binary ? 1u : 2u);
  w.u32(static_cast<std::uint32_t>(model.k()));
  w.ids(model.student_ids());
  w.ids(model.question_ids());
  w.f64(model.global_bias());
  w.doubles(model.student_bias());
  w.doubles(model.question_bias());
  w.doubles(model.student_factors());
  w.doubles(model.question_factors());
  w.finish();
}

MfModel load_mf(const std::filesystem::path& path) {
  Reader r(path);
  expect_kind(read_header(r), ModelKind::mf);
  PredictionMode mode = r.u32() == 1u ? PredictionMode::binary : PredictionMode::categorical;
  int k = static_cast<int>(r.u32());
  auto student_ids = r.ids();
  auto question_ids = r.ids();
  double global_bias = r.f64();
  auto student_bias = r.doubles();
  auto question_bias = r.doubles();
  auto student_factors = r.doubles();
  auto question_factors = r.doubles();
  return MfModel::from_parameters(mode, k, std::move(student_ids), std::move(question_ids),
                                  global_bias, std::move(student_bias), std::move(question_bias),
                                  std::move(student_factors), std::move(question_factors));
}

ModelKind peek_model_kind(const std::filesystem::path& path) {
  Reader r(path);
  return read_header(r);
}

std::unique_ptr<Predictor> load_predictor(const std::filesystem::path& path) {
  switch (peek_model_kind(path)) {
    case ModelKind::majority:
      return std::make_unique<MajorityModel>(load_majority(path));
    case ModelKind::irt:
      return std::make_unique<IrtModel>(load_irt(path));
    case ModelKind::mf:
      return std::make_unique<MfModel>(load_mf(path));
  }
  throw std::runtime_error("unknown model kind");
}

}  // namespace diagq::models
