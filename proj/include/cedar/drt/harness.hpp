#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cedar/ast.hpp"
#include "cedar/expected.hpp"
#include "cedar/request.hpp"

namespace cedar::drt {

using Bytes = std::vector<std::uint8_t>;

// What one check observed, for statistics.
struct Outcome {
  bool pass = true;
  std::string detail;  // why it failed
  std::optional<PolicySet> policies;
  // One entry per evaluated policy: nullopt for success, else the error class.
  std::vector<std::optional<EvalError::Kind>> evals;
};

struct Target {
  std::string name;
  std::function<Outcome(std::span<const std::uint8_t>)> check;
  // Fresh random input for iteration `index` of a run with `seed`.
  std::function<Bytes(std::uint64_t seed, std::uint64_t index)> fresh;
};

const std::vector<Target>& targets();
const Target* find_target(std::string_view name);

struct Stats {
  std::size_t samples = 0;
  std::size_t conditions = 0;
  double bool_literal_fraction = 0;
  // Only for the type-directed target: the same fraction for BoolT samples
  // drawn directly from the typed-expression generator.
  std::optional<double> expr_generator_bool_literal_fraction;
  std::map<std::string, std::size_t> operators;
  double ast_size_mean = 0;
  std::size_t ast_size_p50 = 0;
  std::size_t ast_size_p90 = 0;
  std::size_t evaluations = 0;
  std::map<std::string, double> eval_fractions;  // "success" and each error class
};

class StatsAccumulator {
 public:
  void add(const Outcome& o);
  void merge(const StatsAccumulator& other);
  Stats finish() const;

 private:
  std::size_t samples_ = 0;
  std::size_t bool_literals_ = 0;
  std::vector<std::size_t> sizes_;
  std::map<std::string, std::size_t> operators_;
  std::map<std::string, std::size_t> evals_;
  std::size_t evaluations_ = 0;
};

// Node-kind name used in operator histograms, e.g. "and", "==", "getattr".
std::string op_name(const Expr& e);

Stats compute_stats(const Target& t, std::size_t samples, std::uint64_t seed = 0);

// Fraction of BoolT samples from the typed-expression generator (depth 4)
// that are Bool literals.
double expr_generator_bool_literal_fraction(std::size_t samples, std::uint64_t seed = 0);

struct RunOptions {
  std::optional<std::uint64_t> iterations;
  std::optional<double> seconds;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::optional<std::filesystem::path> corpus_dir;
  bool minimize = true;
};

struct RunReport {
  std::string target;
  std::uint64_t iterations = 0;
  std::vector<std::string> failures;  // corpus hashes (or input hashes without a corpus)
  std::vector<std::string> details;   // one per failure
  Stats stats;
  double wall_seconds = 0;
};

// Replays the target's existing corpus entries, then runs fresh inputs until
// the iteration or time budget is spent. Failing inputs are minimized and
// stored. I/O problems are returned as errors.
Expected<RunReport, std::string> run_target(const Target& t, const RunOptions& opts);

// Runs every entry in `dir` against `t`.
Expected<RunReport, std::string> replay_dir(const Target& t, const std::filesystem::path& dir);

// Runs corpus_root/<target>/* for every target subdirectory present.
Expected<std::vector<RunReport>, std::string> replay_all(const std::filesystem::path& corpus_root);

// ddmin over bytes. Requires t.check(input) to fail; the result still fails.
Bytes minimize_case(const Target& t, Bytes input, std::size_t max_checks = 4000);

std::string sha256_hex(std::span<const std::uint8_t> bytes);

// Writes `bytes` as corpus_dir/<target>/<sha256> via a temp file and rename.
Expected<std::string, std::string> store_case(const std::filesystem::path& corpus_dir,
                                              const std::string& target, std::span<const std::uint8_t> bytes);

Expected<Bytes, std::string> read_file(const std::filesystem::path& path);

std::string stats_json(const Stats& s);
std::string report_json(const RunReport& r);

// Deterministic pseudo-random bytes for (seed, index), of length [min, max].
Bytes random_bytes(std::uint64_t seed, std::uint64_t index, std::size_t min_len, std::size_t max_len);

}  // namespace cedar::drt
