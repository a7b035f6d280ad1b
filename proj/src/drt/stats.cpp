#include <algorithm>
#include <numeric>

#include "cedar/drt/harness.hpp"
#include "cedar/gen/generators.hpp"

namespace cedar::drt {

std::string op_name(const Expr& e) {
  return std::visit(Overloaded{
                        [](const ast::Lit& n) -> std::string {
                          if (n.value.is_bool()) return "bool";
                          if (n.value.is_long()) return "long";
                          return "string";
                        },
                        [](const ast::EntityLit&) -> std::string { return "entity"; },
                        [](const ast::VarRef&) -> std::string { return "var"; },
                        [](const ast::Not&) -> std::string { return "!"; },
                        [](const ast::Neg&) -> std::string { return "neg"; },
                        [](const ast::And&) -> std::string { return "&&"; },
                        [](const ast::Or&) -> std::string { return "||"; },
                        [](const ast::If&) -> std::string { return "if"; },
                        [](const ast::Binary& n) -> std::string { return std::string(op_symbol(n.op)); },
                        [](const ast::Like&) -> std::string { return "like"; },
                        [](const ast::HasAttr&) -> std::string { return "has"; },
                        [](const ast::GetAttr&) -> std::string { return "getattr"; },
                        [](const ast::SetLit&) -> std::string { return "set"; },
                        [](const ast::RecordLit&) -> std::string { return "record"; },
                    },
                    e.node().v);
}

namespace {

void count_ops(const Expr& e, std::map<std::string, std::size_t>& hist) {
  ++hist[op_name(e)];
  for (const auto& c : children(e)) count_ops(c, hist);
}

bool is_bool_literal(const Expr& e) {
  const auto* lit = std::get_if<ast::Lit>(&e.node().v);
  return lit && lit->value.is_bool();
}

}  // namespace

void StatsAccumulator::add(const Outcome& o) {
  ++samples_;
  if (o.policies) {
    for (const auto& p : *o.policies) {
      for (const auto& c : p.conditions) {
        sizes_.push_back(expr_size(c.body));
        if (is_bool_literal(c.body)) ++bool_literals_;
        count_ops(c.body, operators_);
      }
    }
  }
  for (const auto& e : o.evals) {
    ++evaluations_;
    ++evals_[e ? std::string(error_kind_name(*e)) : "success"];
  }
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
  samples_ += other.samples_;
  bool_literals_ += other.bool_literals_;
  sizes_.insert(sizes_.end(), other.sizes_.begin(), other.sizes_.end());
  for (const auto& [k, v] : other.operators_) operators_[k] += v;
  for (const auto& [k, v] : other.evals_) evals_[k] += v;
  evaluations_ += other.evaluations_;
}

Stats StatsAccumulator::finish() const {
  Stats s;
  s.samples = samples_;
  s.conditions = sizes_.size();
  s.operators = operators_;
  s.evaluations = evaluations_;
  if (!sizes_.empty()) {
    s.bool_literal_fraction = static_cast<double>(bool_literals_) / static_cast<double>(sizes_.size());
    auto sorted = sizes_;
    std::sort(sorted.begin(), sorted.end());
    s.ast_size_mean = static_cast<double>(std::accumulate(sorted.begin(), sorted.end(), std::size_t{0})) /
                      static_cast<double>(sorted.size());
    s.ast_size_p50 = sorted[sorted.size() / 2];
    s.ast_size_p90 = sorted[std::min(sorted.size() - 1, sorted.size() * 9 / 10)];
  }
  for (auto kind : {EvalError::Kind::TypeError, EvalError::Kind::MissingAttr, EvalError::Kind::Overflow,
                    EvalError::Kind::ArityOrDomain}) {
    s.eval_fractions[std::string(error_kind_name(kind))] = 0;
  }
  s.eval_fractions["success"] = 0;
  if (evaluations_ > 0) {
    for (const auto& [k, v] : evals_) s.eval_fractions[k] = static_cast<double>(v) / static_cast<double>(evaluations_);
  }
  return s;
}

double expr_generator_bool_literal_fraction(std::size_t samples, std::uint64_t seed) {
  std::size_t literals = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    Bytes world_bytes = random_bytes(seed, 2 * i, 16, 768);
    Bytes expr_bytes = random_bytes(seed, 2 * i + 1, 16, 768);
    gen::ByteCursor wc(world_bytes);
    auto w = gen::gen_world(wc);
    gen::ByteCursor ec(expr_bytes);
    auto e = gen::gen_expr(ec, gen::request_env(w), Type::boolean(), w, 4);
    if (e && is_bool_literal(*e)) ++literals;
  }
  return samples == 0 ? 0.0 : static_cast<double>(literals) / static_cast<double>(samples);
}

Stats compute_stats(const Target& t, std::size_t samples, std::uint64_t seed) {
  StatsAccumulator acc;
  for (std::size_t i = 0; i < samples; ++i) {
    Bytes input = t.fresh(seed, i);
    acc.add(t.check(input));
  }
  Stats s = acc.finish();
  if (t.name == "authorizer-parity-abac-typed") {
    s.expr_generator_bool_literal_fraction = expr_generator_bool_literal_fraction(samples, seed);
  }
  return s;
}

}  // namespace cedar::drt
