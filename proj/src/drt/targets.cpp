#include <algorithm>
#include <random>
#include <sstream>

#include "cedar/authorizer.hpp"
#include "cedar/conformance.hpp"
#include "cedar/drt/harness.hpp"
#include "cedar/gen/generators.hpp"
#include "cedar/reference/model.hpp"
#include "cedar/syntax.hpp"
#include "cedar/validator.hpp"

namespace cedar::drt {

Bytes random_bytes(std::uint64_t seed, std::uint64_t index, std::size_t min_len, std::size_t max_len) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  Bytes out(len(rng));
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

namespace {

using gen::ByteCursor;
using gen::PolicyMode;

std::string decision_name(Decision d) { return d == Decision::Allow ? "Allow" : "Deny"; }

std::string join(const std::set<std::string>& s) {
  std::string out = "{";
  for (const auto& x : s) out += (out.size() > 1 ? "," : "") + x;
  return out + "}";
}

std::string response_text(const Response& r) {
  return decision_name(r.decision) + " determining " + join(r.determining) + " errors " + join(r.erroring_ids());
}

void record_evals(Outcome& o, const Response& r, const PolicySet& ps) {
  std::map<std::string, EvalError::Kind> errs;
  for (const auto& [id, e] : r.errors) errs.emplace(id, e.kind);
  for (const auto& p : ps) {
    auto it = errs.find(p.id);
    if (it == errs.end()) {
      o.evals.emplace_back(std::nullopt);
    } else {
      o.evals.emplace_back(it->second);
    }
  }
}

Outcome authorizer_parity(std::span<const std::uint8_t> bytes, PolicyMode mode) {
  ByteCursor c(bytes);
  auto w = gen::gen_world(c);
  auto ps = gen::gen_policies(mode, c, w);
  auto prod = is_authorized(w.request, w.store, ps);
  auto ref = reference::is_authorized(w.request, w.store, ps);
  Outcome o;
  record_evals(o, prod, ps);
  if (prod.decision != ref.decision || prod.determining != ref.determining ||
      prod.erroring_ids() != ref.erroring_ids()) {
    o.pass = false;
    o.detail = "production " + response_text(prod) + " vs reference " + response_text(ref) + "\n" + pretty_print(ps);
  }
  o.policies = std::move(ps);
  return o;
}

Outcome validator_parity(std::span<const std::uint8_t> bytes) {
  ByteCursor c(bytes);
  auto w = gen::gen_world(c);
  auto mode = c.choose(4) == 3 ? PolicyMode::ArbitraryABAC : PolicyMode::TypeDirectedABAC;
  auto ps = gen::gen_policies(mode, c, w);
  Outcome o;
  for (const auto& p : ps) {
    bool prod = validate_policy(p, w.schema).empty();
    bool ref = reference::validate_policy(p, w.schema);
    if (prod != ref) {
      o.pass = false;
      o.detail = std::string("production ") + (prod ? "accepts" : "rejects") + ", reference " +
                 (ref ? "accepts" : "rejects") + "\n" + pretty_print(p);
    }
  }
  o.policies = std::move(ps);
  return o;
}

PolicySet any_mode_policies(ByteCursor& c, const gen::World& w) {
  constexpr PolicyMode kModes[] = {PolicyMode::TypeDirectedABAC, PolicyMode::ArbitraryABAC, PolicyMode::RBAC};
  return gen::gen_policies(kModes[c.choose(3)], c, w);
}

Outcome parser_roundtrip(std::span<const std::uint8_t> bytes) {
  ByteCursor c(bytes);
  auto w = gen::gen_world(c);
  auto ps = any_mode_policies(c, w);
  Outcome o;
  std::string text = pretty_print(ps);
  auto back = parse_policy_set(text);
  if (!back) {
    o.pass = false;
    o.detail = to_string(back.error()) + "\n" + text;
  } else if (!(*back == ps)) {
    o.pass = false;
    o.detail = "reparsed policies differ\n" + text + "\n" + pretty_print(*back);
  }
  o.policies = std::move(ps);
  return o;
}

constexpr std::string_view kComments[] = {"// note", "//", "// a // b", "// été ünï", "// \"quoted\" { } ; )",
                                          "// permit(principal, action, resource);", "//x"};

Outcome formatter_roundtrip(std::span<const std::uint8_t> bytes) {
  ByteCursor c(bytes);
  auto w = gen::gen_world(c);
  auto ps = any_mode_policies(c, w);
  constexpr std::size_t kWidths[] = {80, 40, 120};
  std::size_t width = kWidths[c.choose(3)];

  // Comment lines before lines and trailing comments after them.
  std::string text;
  std::vector<std::string> injected;
  std::istringstream lines(pretty_print(ps));
  for (std::string line; std::getline(lines, line);) {
    if (c.choose(4) == 3) {
      injected.emplace_back(kComments[c.choose(std::size(kComments))]);
      text += injected.back() + "\n";
    }
    text += line;
    if (c.choose(4) == 3) {
      injected.emplace_back(kComments[c.choose(std::size(kComments))]);
      text += " " + injected.back();
    }
    text += "\n";
  }
  if (c.flip()) {
    injected.emplace_back(kComments[c.choose(std::size(kComments))]);
    text += injected.back();
  }

  Outcome o;
  auto fail = [&](std::string why) {
    o.pass = false;
    o.detail = std::move(why) + "\nwidth " + std::to_string(width) + "\n" + text;
  };
  auto formatted = format_text(text, width);
  if (!formatted) {
    fail("format failed: " + to_string(formatted.error()));
  } else if (auto back = parse_policy_set(*formatted); !back) {
    fail("formatted text does not parse: " + to_string(back.error()) + "\n" + *formatted);
  } else if (!(*back == ps)) {
    fail("formatted text parses to different policies\n" + *formatted);
  } else {
    auto comments = collect_comments(*formatted);
    std::sort(injected.begin(), injected.end());
    std::vector<std::string> got = comments ? *comments : std::vector<std::string>{};
    std::sort(got.begin(), got.end());
    if (got != injected) {
      fail("comments not preserved\n" + *formatted);
    } else if (auto again = format_text(*formatted, width); !again || *again != *formatted) {
      fail("formatting is not idempotent\n" + *formatted);
    }
  }
  o.policies = std::move(ps);
  return o;
}

Outcome parser_safety(std::span<const std::uint8_t> bytes) {
  std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  Outcome o;
  auto ps = parse_policy_set(text);
  if (!ps) {
    const auto& span = ps.error().span;
    if (span.start > span.end || span.end > text.size()) {
      o.pass = false;
      o.detail = "error span out of range: " + to_string(ps.error());
    }
    return o;
  }
  std::string printed = pretty_print(*ps);
  auto back = parse_policy_set(printed);
  if (!back || !(*back == *ps)) {
    o.pass = false;
    o.detail = "accepted input does not roundtrip\n" + printed;
  }
  o.policies = std::move(*ps);
  return o;
}

// Text of a generated policy set with a few byte-level mutations, so that
// parser-safety also reaches deep into the grammar.
Bytes mutated_policy_text(std::uint64_t seed, std::uint64_t index) {
  Bytes raw = random_bytes(seed, index, 0, 512);
  if (raw.empty() || raw[0] % 2 == 0) return raw;
  ByteCursor c{std::span<const std::uint8_t>(raw).subspan(1)};
  auto w = gen::gen_world(c);
  auto ps = any_mode_policies(c, w);
  std::string text = pretty_print(ps);
  Bytes out(text.begin(), text.end());
  std::size_t edits = 1 + c.choose(4);
  for (std::size_t i = 0; i < edits && !out.empty(); ++i) {
    std::size_t at = c.choose(out.size());
    switch (c.choose(3)) {
      case 0: out[at] = static_cast<std::uint8_t>(c.choose(256)); break;
      case 1: out.erase(out.begin() + static_cast<long>(at)); break;
      default: out.insert(out.begin() + static_cast<long>(at), static_cast<std::uint8_t>(c.choose(256)));
    }
  }
  return out;
}

Outcome validation_soundness(std::span<const std::uint8_t> bytes) {
  ByteCursor c(bytes);
  auto w = gen::gen_world(c);
  auto ps = gen::gen_policies(PolicyMode::TypeDirectedABAC, c, w);
  Outcome o;
  if (!store_conforms(w.store, w.schema) || !request_conforms(w.request, w.schema)) {
    o.pass = false;
    o.detail = "generated world does not conform";
    return o;
  }
  if (!validate_policy_set(ps, w.schema).empty()) {
    o.policies = std::move(ps);
    return o;
  }
  auto r = is_authorized(w.request, w.store, ps);
  record_evals(o, r, ps);
  for (const auto& [id, e] : r.errors) {
    if (e.kind == EvalError::Kind::TypeError || e.kind == EvalError::Kind::MissingAttr) {
      o.pass = false;
      o.detail = "validated policy " + id + " raised " + to_string(e) + "\n" + pretty_print(ps);
    }
  }
  o.policies = std::move(ps);
  return o;
}

Outcome slicing_soundness(std::span<const std::uint8_t> bytes) {
  ByteCursor c(bytes);
  auto w = gen::gen_world(c);
  auto rbac = gen::gen_policies(PolicyMode::RBAC, c, w);
  auto abac = gen::gen_policies(PolicyMode::TypeDirectedABAC, c, w);
  std::vector<Policy> all = rbac.policies();
  Policy extra = abac.policies().front();
  extra.id = "policy" + std::to_string(all.size());
  all.push_back(std::move(extra));
  auto ps = *PolicySet::make(std::move(all));
  auto full = is_authorized(w.request, w.store, ps);
  auto sliced = is_authorized(w.request, w.store, slice(ps, w.request, w.store));
  Outcome o;
  record_evals(o, full, ps);
  if (full.decision != sliced.decision) {
    o.pass = false;
    o.detail = "full " + response_text(full) + " vs slice " + response_text(sliced) + "\n" + pretty_print(ps);
  }
  o.policies = std::move(ps);
  return o;
}

std::function<Bytes(std::uint64_t, std::uint64_t)> random_of(std::size_t min_len, std::size_t max_len) {
  return [=](std::uint64_t seed, std::uint64_t index) { return random_bytes(seed, index, min_len, max_len); };
}

std::vector<Target> make_targets() {
  auto gen_input = random_of(16, 768);
  return {
      {"authorizer-parity-abac-typed", [](auto b) { return authorizer_parity(b, PolicyMode::TypeDirectedABAC); },
       gen_input},
      {"authorizer-parity-abac", [](auto b) { return authorizer_parity(b, PolicyMode::ArbitraryABAC); }, gen_input},
      {"authorizer-parity-rbac", [](auto b) { return authorizer_parity(b, PolicyMode::RBAC); }, gen_input},
      {"validator-parity", validator_parity, gen_input},
      {"parser-roundtrip", parser_roundtrip, gen_input},
      {"formatter-roundtrip", formatter_roundtrip, gen_input},
      {"parser-safety", parser_safety, mutated_policy_text},
      {"validation-soundness", validation_soundness, gen_input},
      {"slicing-soundness", slicing_soundness, gen_input},
  };
}

}  // namespace

const std::vector<Target>& targets() {
  static const std::vector<Target> kTargets = make_targets();
  return kTargets;
}

const Target* find_target(std::string_view name) {
  for (const auto& t : targets()) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

}  // namespace cedar::drt
