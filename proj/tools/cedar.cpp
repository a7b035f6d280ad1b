// Command-line front end: authorize, validate, format, fuzz.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "cedar/authorizer.hpp"
#include "cedar/data_json.hpp"
#include "cedar/drt/harness.hpp"
#include "cedar/syntax.hpp"
#include "cedar/validator.hpp"

namespace {

using nlohmann::json;
namespace drt = cedar::drt;

constexpr int kOk = 0;
constexpr int kFailures = 1;
constexpr int kInputError = 2;
constexpr int kNegative = 3;

struct InputError {
  std::string message;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError{"cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
T or_throw(cedar::Expected<T, cedar::ParseError> r, const std::string& path) {
  if (!r) throw InputError{path + ": " + cedar::to_string(r.error())};
  return std::move(*r);
}

int authorize(const std::string& policies, const std::string& entities, const std::string& schema,
              const std::string& request) {
  auto ps = or_throw(cedar::parse_policy_set(slurp(policies)), policies);
  auto store = or_throw(cedar::parse_entities(slurp(entities)), entities);
  auto req = or_throw(cedar::parse_request(slurp(request)), request);
  if (!schema.empty()) or_throw(cedar::parse_schema(slurp(schema)), schema);
  auto r = cedar::is_authorized(req, store, ps);
  json errors = json::array();
  for (const auto& [id, e] : r.errors) errors.push_back({{"policy", id}, {"error", cedar::to_string(e)}});
  json out{{"decision", r.decision == cedar::Decision::Allow ? "Allow" : "Deny"},
           {"determining", r.determining},
           {"errors", errors}};
  std::cout << out.dump() << "\n";
  return r.decision == cedar::Decision::Allow ? kOk : kNegative;
}

int validate(const std::string& policies, const std::string& schema) {
  auto ps = or_throw(cedar::parse_policy_set(slurp(policies)), policies);
  auto sc = or_throw(cedar::parse_schema(slurp(schema)), schema);
  auto problems = cedar::validate_policy_set(ps, sc);
  json errs = json::object();
  for (const auto& [id, list] : problems) {
    json arr = json::array();
    for (const auto& e : list) arr.push_back({{"expr", e.expr}, {"message", e.message}});
    errs[id] = arr;
  }
  std::cout << json{{"valid", problems.empty()}, {"errors", errs}}.dump() << "\n";
  return problems.empty() ? kOk : kNegative;
}

int format(const std::string& in, std::size_t width) {
  auto text = or_throw(cedar::format_text(slurp(in), width), in);
  std::cout << text;
  return kOk;
}

void print_report(const drt::RunReport& r) {
  std::cout << drt::report_json(r) << "\n";
  for (std::size_t i = 0; i < r.failures.size(); ++i) {
    std::cerr << r.target << " " << r.failures[i] << ": " << r.details[i] << "\n";
  }
}

const drt::Target& target_or_throw(const std::string& name) {
  const auto* t = drt::find_target(name);
  if (!t) throw InputError{"unknown target " + name};
  return *t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Authorization policy engine"};
  app.require_subcommand(1);

  std::string policies, entities, schema, request, in;
  std::size_t width = 80;

  auto* authz = app.add_subcommand("authorize", "Decide a request against a policy set");
  authz->add_option("--policies", policies)->required();
  authz->add_option("--entities", entities)->required();
  authz->add_option("--schema", schema);
  authz->add_option("--request", request)->required();

  auto* val = app.add_subcommand("validate", "Typecheck policies against a schema");
  val->add_option("--policies", policies)->required();
  val->add_option("--schema", schema)->required();

  auto* fmt = app.add_subcommand("format", "Reflow policy text, keeping comments");
  fmt->add_option("--in", in)->required();
  fmt->add_option("--width", width)->check(CLI::PositiveNumber);

  auto* fuzz = app.add_subcommand("fuzz", "Differential and property testing");
  fuzz->require_subcommand(1);
  std::string target, corpus = "corpus", file;
  std::uint64_t iterations = 0, seed = 0;
  double seconds = 0;
  std::size_t threads = 0, samples = 1000;
  bool no_minimize = false;

  auto* run = fuzz->add_subcommand("run", "Run a target on fresh inputs");
  run->add_option("--target", target)->required();
  auto* iter_opt = run->add_option("--iterations", iterations);
  auto* sec_opt = run->add_option("--seconds", seconds);
  iter_opt->excludes(sec_opt);
  run->add_option("--corpus", corpus);
  run->add_option("--seed", seed);
  run->add_option("--threads", threads);
  run->add_flag("--no-minimize", no_minimize);

  auto* replay = fuzz->add_subcommand("replay", "Replay one stored input, or a target's whole corpus");
  replay->add_option("--target", target)->required();
  replay->add_option("--file", file);
  replay->add_option("--corpus", corpus);

  auto* replay_all = fuzz->add_subcommand("replay-all", "Replay every stored input of every target");
  replay_all->add_option("--corpus", corpus);

  auto* minimize = fuzz->add_subcommand("minimize", "Shrink a failing input and store it");
  minimize->add_option("--target", target)->required();
  minimize->add_option("--file", file)->required();
  minimize->add_option("--corpus", corpus);

  auto* stats = fuzz->add_subcommand("stats", "Generator statistics for a target");
  stats->add_option("--target", target)->required();
  stats->add_option("--samples", samples)->check(CLI::PositiveNumber);
  stats->add_option("--seed", seed);

  auto* seed_cmd = fuzz->add_subcommand("seed", "Store passing inputs as regression entries");
  seed_cmd->add_option("--target", target)->required();
  seed_cmd->add_option("--count", samples);
  seed_cmd->add_option("--corpus", corpus);
  seed_cmd->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*authz) return authorize(policies, entities, schema, request);
    if (*val) return validate(policies, schema);
    if (*fmt) return format(in, width);

    if (*run) {
      drt::RunOptions opts;
      if (*iter_opt) opts.iterations = iterations;
      if (*sec_opt) opts.seconds = seconds;
      if (!opts.iterations && !opts.seconds) opts.iterations = 10000;
      opts.seed = seed;
      opts.threads = threads;
      opts.corpus_dir = corpus;
      opts.minimize = !no_minimize;
      auto r = drt::run_target(target_or_throw(target), opts);
      if (!r) throw InputError{r.error()};
      print_report(*r);
      return r->failures.empty() ? kOk : kFailures;
    }
    if (*replay) {
      const auto& t = target_or_throw(target);
      if (file.empty()) {
        auto r = drt::replay_dir(t, std::filesystem::path(corpus) / t.name);
        if (!r) throw InputError{r.error()};
        print_report(*r);
        return r->failures.empty() ? kOk : kFailures;
      }
      auto bytes = drt::read_file(file);
      if (!bytes) throw InputError{bytes.error()};
      auto o = t.check(*bytes);
      std::cout << json{{"target", t.name}, {"file", file}, {"pass", o.pass}}.dump() << "\n";
      if (!o.pass) std::cerr << o.detail << "\n";
      return o.pass ? kOk : kFailures;
    }
    if (*replay_all) {
      auto reports = drt::replay_all(corpus);
      if (!reports) throw InputError{reports.error()};
      bool clean = true;
      for (const auto& r : *reports) {
        print_report(r);
        clean = clean && r.failures.empty();
      }
      return clean ? kOk : kFailures;
    }
    if (*minimize) {
      const auto& t = target_or_throw(target);
      auto bytes = drt::read_file(file);
      if (!bytes) throw InputError{bytes.error()};
      if (t.check(*bytes).pass) throw InputError{file + " passes; nothing to minimize"};
      auto small = drt::minimize_case(t, std::move(*bytes));
      auto hash = drt::store_case(corpus, t.name, small);
      if (!hash) throw InputError{hash.error()};
      std::cout << json{{"target", t.name}, {"hash", *hash}, {"size", small.size()}}.dump() << "\n";
      return kOk;
    }
    if (*stats) {
      const auto& t = target_or_throw(target);
      auto s = drt::compute_stats(t, samples, seed);
      std::cout << "{\"target\":" << json(t.name).dump() << ",\"stats\":" << drt::stats_json(s) << "}\n";
      return kOk;
    }
    if (*seed_cmd) {
      // Keeps inputs whose first failing-or-passing signature is new, so the
      // stored set covers varied operators and error classes.
      const auto& t = target_or_throw(target);
      std::set<std::string> seen;
      std::size_t stored = 0;
      for (std::uint64_t i = 0; stored < samples && i < samples * 200; ++i) {
        auto bytes = t.fresh(seed, i);
        auto o = t.check(bytes);
        if (!o.pass) throw InputError{"input " + std::to_string(i) + " fails: " + o.detail};
        drt::StatsAccumulator acc;
        acc.add(o);
        auto st = acc.finish();
        std::string sig;
        if (o.policies) {
          for (const auto& p : *o.policies) {
            sig += p.effect == cedar::Effect::Permit ? 'P' : 'F';
            sig += std::to_string(static_cast<int>(p.principal.kind)) +
                   std::to_string(static_cast<int>(p.action.kind)) + std::to_string(static_cast<int>(p.resource.kind));
          }
          sig += "|";
        }
        for (const auto& [op, n] : st.operators) sig += op + ",";
        for (const auto& [k, f] : st.eval_fractions) {
          if (f > 0) sig += k + ";";
        }
        if (!seen.insert(sig).second) continue;
        auto hash = drt::store_case(corpus, t.name, bytes);
        if (!hash) throw InputError{hash.error()};
        ++stored;
      }
      std::cout << json{{"target", t.name}, {"stored", stored}}.dump() << "\n";
      return kOk;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kInputError;
  }
  return kInputError;
}
