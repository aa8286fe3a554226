#include "diagq/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "diagq/csv.hpp"
#include "diagq/irt.hpp"  // sigmoid

namespace diagq::synth {

namespace {

void check_config(const SynthConfig& config) {
  if (config.n_students < 1 || config.n_questions < 1) {
    throw std::invalid_argument("synth: student and question counts must be >= 1");
  }
  if (!(config.density > 0.0) || config.density > 1.0) {
    throw std::invalid_argument("synth: density must lie in (0, 1]");
  }
  if (config.n_groups < 1 || config.n_quizzes < 1) {
    throw std::invalid_argument("synth: group and quiz counts must be >= 1");
  }
  if (config.confidence_noise < 0) {
    throw std::invalid_argument("synth: confidence noise must be >= 0");
  }
}

}  // namespace

GroundTruth gen_ground_truth(const SynthConfig& config) {
  check_config(config);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> std_normal(0.0, 1.0);
  std::normal_distribution<double> log_disc(0.0, 0.25);
  std::uniform_int_distribution<int> option(1, 4);
  std::exponential_distribution<double> exp1(1.0);  // Dirichlet(1,1,1) via Exp(1) normalization

  GroundTruth truth;
  truth.theta.resize(static_cast<std::size_t>(config.n_students));
  for (double& t : truth.theta) t = std_normal(rng);

  const std::size_t m = static_cast<std::size_t>(config.n_questions);
  truth.a.resize(m);
  truth.b.resize(m);
  truth.correct_option.resize(m);
  truth.distractor_dist.resize(m);
  for (std::size_t q = 0; q < m; ++q) {
    truth.a[q] = std::exp(log_disc(rng));
    truth.b[q] = std_normal(rng);
    truth.correct_option[q] = option(rng);
    std::array<double, 3> gamma{exp1(rng), exp1(rng), exp1(rng)};
    double total = gamma[0] + gamma[1] + gamma[2];
    for (std::size_t i = 0; i < 3; ++i) truth.distractor_dist[q][i] = gamma[i] / total;
  }
  return truth;
}

double oracle_probability(const GroundTruth& truth, int student, int question) {
  if (student < 0 || static_cast<std::size_t>(student) >= truth.n_students() || question < 0 ||
      static_cast<std::size_t>(question) >= truth.n_questions()) {
    throw std::out_of_range("oracle_probability: id out of range");
  }
  const std::size_t s = static_cast<std::size_t>(student);
  const std::size_t q = static_cast<std::size_t>(question);
  return models::sigmoid(truth.a[q] * (truth.theta[s] - truth.b[q]));
}

SynthDataset sample_responses(const GroundTruth& truth, const SynthConfig& config) {
  check_config(config);
  if (truth.n_students() != static_cast<std::size_t>(config.n_students) ||
      truth.n_questions() != static_cast<std::size_t>(config.n_questions)) {
    throw std::invalid_argument("synth: truth dimensions do not match config");
  }
  // Distinct stream from gen_ground_truth so truth stays fixed across samples.
  std::mt19937_64 rng(config.seed ^ 0x5851f42d4c957f2dull);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> conf_noise(0.0, 1.0);
  std::uniform_int_distribution<Id> group(0, config.n_groups - 1);
  std::uniform_int_distribution<Id> quiz(0, config.n_quizzes - 1);
  std::uniform_int_distribution<Id> scheme(0, config.n_quizzes - 1);
  // One school year of answer timestamps.
  const Timestamp t0 = to_timestamp(Date{2019, 9, 1});
  const Timestamp t1 = to_timestamp(Date{2020, 5, 31});
  std::uniform_int_distribution<std::int64_t> when(t0.millis, t1.millis);

  SynthDataset out;
  Id next_answer_id = 0;
  for (int s = 0; s < config.n_students; ++s) {
    for (int q = 0; q < config.n_questions; ++q) {
      if (config.density < 1.0 && unit(rng) >= config.density) continue;
      const double p = oracle_probability(truth, s, q);
      const bool correct = unit(rng) < p;
      const std::size_t qi = static_cast<std::size_t>(q);

      data::ResponseRecord r;
      r.question_id = q;
      r.user_id = s;
      r.answer_id = next_answer_id++;
      r.correct_answer = truth.correct_option[qi];
      if (correct) {
        r.answer_value = r.correct_answer;
      } else {
        double u = unit(rng);
        int slot = 2;
        if (u < truth.distractor_dist[qi][0]) {
          slot = 0;
        } else if (u < truth.distractor_dist[qi][0] + truth.distractor_dist[qi][1]) {
          slot = 1;
        }
        // Distractor slots map onto the non-correct options in ascending order.
        int option = 0;
        for (int candidate = 1; candidate <= 4; ++candidate) {
          if (candidate == r.correct_answer) continue;
          if (slot-- == 0) {
            option = candidate;
            break;
          }
        }
        r.answer_value = option;
      }
      r.is_correct = r.answer_value == r.correct_answer ? 1 : 0;
      out.records.push_back(r);

      data::AnswerMeta meta;
      meta.answer_id = r.answer_id;
      meta.date_answered = Timestamp{when(rng)};
      double conf = 100.0 * p + config.confidence_noise * conf_noise(rng);
      meta.confidence = static_cast<int>(std::clamp(std::round(conf), 0.0, 100.0));
      meta.group_id = group(rng);
      meta.quiz_id = quiz(rng);
      meta.scheme_of_work_id = scheme(rng);
      out.answers.push_back(meta);
    }
  }

  std::uniform_int_distribution<int> gender(0, 3);
  std::uniform_int_distribution<int> birth_year(2002, 2011);
  std::uniform_int_distribution<int> birth_month(1, 12);
  for (int s = 0; s < config.n_students; ++s) {
    data::StudentMeta meta;
    meta.user_id = s;
    meta.gender = gender(rng);
    meta.date_of_birth = Date{birth_year(rng), birth_month(rng), 1};
    if (unit(rng) < 0.7) meta.premium_pupil = unit(rng) < 0.3 ? 1 : 0;
    out.students.push_back(meta);
  }

  // Small fixed subject forest: three roots, four children each.
  Id next_subject = 1;
  std::vector<Id> leaves;
  for (int root = 0; root < 3; ++root) {
    Id root_id = next_subject++;
    out.subjects.add(root_id, data::SubjectNode{"Subject " + std::to_string(root_id),
                                                std::nullopt, 0});
    for (int child = 0; child < 4; ++child) {
      Id child_id = next_subject++;
      out.subjects.add(child_id, data::SubjectNode{"Subject " + std::to_string(child_id),
                                                   root_id, 1});
      leaves.push_back(child_id);
    }
  }
  std::uniform_int_distribution<std::size_t> leaf(0, leaves.size() - 1);
  for (int q = 0; q < config.n_questions; ++q) {
    data::QuestionMeta meta;
    meta.question_id = q;
    Id child = leaves[leaf(rng)];
    meta.subject_ids = {*out.subjects.find(child)->parent_id, child};
    out.questions.push_back(std::move(meta));
  }
  return out;
}

void write_dataset_csvs(const SynthDataset& dataset, const GroundTruth& truth,
                        const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir);
  data::write_records(outdir / "train_task_1_2.csv", dataset.records);
  data::write_student_metadata(outdir / "student_metadata_task_1_2.csv", dataset.students);
  data::write_answer_metadata(outdir / "answer_metadata_task_1_2.csv", dataset.answers);
  data::write_question_metadata(outdir / "question_metadata_task_1_2.csv", dataset.questions);
  data::write_subject_metadata(outdir / "subject_metadata.csv", dataset.subjects);

  csv::Table table;
  table.header = {"StudentOrQuestionId", "Role", "Theta", "A", "B", "CorrectOption"};
  for (std::size_t s = 0; s < truth.n_students(); ++s) {
    table.rows.push_back({std::to_string(s), "student", std::to_string(truth.theta[s]), "", "",
                          ""});
  }
  for (std::size_t q = 0; q < truth.n_questions(); ++q) {
    table.rows.push_back({std::to_string(q), "question", "", std::to_string(truth.a[q]),
                          std::to_string(truth.b[q]), std::to_string(truth.correct_option[q])});
  }
  csv::write_file(outdir / "ground_truth.csv", table);
}

}  // namespace diagq::synth
