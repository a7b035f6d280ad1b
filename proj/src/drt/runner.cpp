#include <openssl/sha.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "cedar/drt/harness.hpp"

namespace cedar::drt {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(bytes.data(), bytes.size(), digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out += kHex[b >> 4];
    out += kHex[b & 0xF];
  }
  return out;
}

Expected<Bytes, std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Unexpected("cannot read " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Expected<std::string, std::string> store_case(const fs::path& corpus_dir, const std::string& target,
                                              std::span<const std::uint8_t> bytes) {
  std::string hash = sha256_hex(bytes);
  fs::path dir = corpus_dir / target;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return Unexpected("cannot create " + dir.string() + ": " + ec.message());
  fs::path final_path = dir / hash;
  if (fs::exists(final_path)) return hash;
  fs::path tmp = dir / ("." + hash + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())));
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) return Unexpected("cannot write " + tmp.string());
  }
  fs::rename(tmp, final_path, ec);
  if (ec) return Unexpected("cannot rename into " + final_path.string() + ": " + ec.message());
  return hash;
}

Bytes minimize_case(const Target& t, Bytes input, std::size_t max_checks) {
  std::size_t checks = 0;
  auto fails = [&](const Bytes& b) {
    ++checks;
    return !t.check(b).pass;
  };
  std::size_t n = 2;
  while (input.size() >= 2 && checks < max_checks) {
    std::size_t chunk = (input.size() + n - 1) / n;
    bool reduced = false;
    // Try each chunk alone, then each complement.
    for (std::size_t i = 0; i < n && !reduced && checks < max_checks; ++i) {
      std::size_t lo = i * chunk;
      if (lo >= input.size()) break;
      std::size_t hi = std::min(input.size(), lo + chunk);
      Bytes subset(input.begin() + static_cast<long>(lo), input.begin() + static_cast<long>(hi));
      if (subset.size() < input.size() && fails(subset)) {
        input = std::move(subset);
        n = 2;
        reduced = true;
      }
    }
    for (std::size_t i = 0; i < n && !reduced && checks < max_checks; ++i) {
      std::size_t lo = i * chunk;
      if (lo >= input.size()) break;
      std::size_t hi = std::min(input.size(), lo + chunk);
      Bytes complement(input.begin(), input.begin() + static_cast<long>(lo));
      complement.insert(complement.end(), input.begin() + static_cast<long>(hi), input.end());
      if (fails(complement)) {
        input = std::move(complement);
        n = std::max<std::size_t>(n - 1, 2);
        reduced = true;
      }
    }
    if (!reduced) {
      if (n >= input.size()) break;
      n = std::min(input.size(), n * 2);
    }
  }
  if (input.size() == 1 && checks < max_checks && fails(Bytes{})) input.clear();
  return input;
}

namespace {

struct Shared {
  std::mutex mu;
  StatsAccumulator stats;
  std::vector<std::pair<std::string, std::string>> failures;  // hash, detail
  std::string io_error;
};

void handle_failure(const Target& t, const RunOptions& opts, Bytes input, const Outcome& o, Shared& shared,
                    bool already_stored) {
  std::string detail = o.detail;
  std::string hash;
  if (opts.corpus_dir && !already_stored) {
    if (opts.minimize) {
      input = minimize_case(t, std::move(input));
      detail = t.check(input).detail;
    }
    auto stored = store_case(*opts.corpus_dir, t.name, input);
    std::lock_guard lock(shared.mu);
    if (!stored) {
      shared.io_error = stored.error();
      return;
    }
    hash = *stored;
  } else {
    hash = sha256_hex(input);
  }
  std::lock_guard lock(shared.mu);
  shared.failures.emplace_back(hash, detail);
}

std::vector<fs::path> corpus_files(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename().string().front() != '.') files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

RunReport finish(const std::string& name, std::uint64_t iterations, Shared& shared, double seconds) {
  RunReport r;
  r.target = name;
  r.iterations = iterations;
  std::sort(shared.failures.begin(), shared.failures.end());
  for (auto& [h, d] : shared.failures) {
    r.failures.push_back(h);
    r.details.push_back(d);
  }
  r.stats = shared.stats.finish();
  r.wall_seconds = seconds;
  return r;
}

}  // namespace

Expected<RunReport, std::string> replay_dir(const Target& t, const fs::path& dir) {
  auto start = std::chrono::steady_clock::now();
  Shared shared;
  std::uint64_t n = 0;
  for (const auto& path : corpus_files(dir)) {
    auto bytes = read_file(path);
    if (!bytes) return Unexpected(bytes.error());
    Outcome o = t.check(*bytes);
    shared.stats.add(o);
    ++n;
    if (!o.pass) shared.failures.emplace_back(path.filename().string(), o.detail);
  }
  std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
  return finish(t.name, n, shared, took.count());
}

Expected<std::vector<RunReport>, std::string> replay_all(const fs::path& corpus_root) {
  std::error_code ec;
  if (!fs::is_directory(corpus_root, ec)) return Unexpected("no corpus directory " + corpus_root.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(corpus_root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<RunReport> out;
  for (const auto& dir : dirs) {
    const Target* t = find_target(dir.filename().string());
    if (!t) return Unexpected("corpus directory for unknown target: " + dir.string());
    auto r = replay_dir(*t, dir);
    if (!r) return Unexpected(r.error());
    out.push_back(std::move(*r));
  }
  return out;
}

Expected<RunReport, std::string> run_target(const Target& t, const RunOptions& opts) {
  if (!opts.iterations && !opts.seconds) return Unexpected(std::string("no iteration or time budget"));
  auto start = std::chrono::steady_clock::now();
  Shared shared;
  std::uint64_t replayed = 0;

  if (opts.corpus_dir) {
    for (const auto& path : corpus_files(*opts.corpus_dir / t.name)) {
      auto bytes = read_file(path);
      if (!bytes) return Unexpected(bytes.error());
      Outcome o = t.check(*bytes);
      shared.stats.add(o);
      ++replayed;
      if (!o.pass) shared.failures.emplace_back(path.filename().string(), o.detail);
    }
  }

  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> done{0};
  const auto deadline = opts.seconds ? start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                   std::chrono::duration<double>(*opts.seconds))
                                     : std::chrono::steady_clock::time_point::max();
  auto worker = [&] {
    StatsAccumulator local;
    while (true) {
      if (std::chrono::steady_clock::now() >= deadline) break;
      std::uint64_t i = next.fetch_add(1);
      if (opts.iterations && i >= *opts.iterations) break;
      Bytes input = t.fresh(opts.seed, i);
      Outcome o = t.check(input);
      local.add(o);
      done.fetch_add(1);
      if (!o.pass) handle_failure(t, opts, std::move(input), o, shared, false);
    }
    std::lock_guard lock(shared.mu);
    shared.stats.merge(local);
  };
  std::size_t threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (!shared.io_error.empty()) return Unexpected(shared.io_error);

  std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
  return finish(t.name, replayed + done.load(), shared, took.count());
}

namespace {

json stats_to_json(const Stats& s) {
  json j{{"samples", s.samples},
         {"conditions", s.conditions},
         {"bool_literal_fraction", s.bool_literal_fraction},
         {"operators", s.operators},
         {"ast_size", {{"mean", s.ast_size_mean}, {"p50", s.ast_size_p50}, {"p90", s.ast_size_p90}}},
         {"evaluations", s.evaluations},
         {"eval", s.eval_fractions}};
  if (s.expr_generator_bool_literal_fraction) {
    j["expr_generator_bool_literal_fraction"] = *s.expr_generator_bool_literal_fraction;
  }
  return j;
}

}  // namespace

std::string stats_json(const Stats& s) { return stats_to_json(s).dump(); }

std::string report_json(const RunReport& r) {
  return json{{"target", r.target},
              {"iterations", r.iterations},
              {"failures", r.failures},
              {"stats", stats_to_json(r.stats)},
              {"wall_seconds", r.wall_seconds}}
      .dump();
}

}  // namespace cedar::drt
