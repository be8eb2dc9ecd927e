#include "cbr/state.hpp"

#include <limits>

#include "cbr/error.hpp"

namespace cbr {

char to_char(Ternary v) {
  switch (v) {
    case Ternary::T: return 'T';
    case Ternary::F: return 'F';
    case Ternary::U: return 'U';
  }
  return '?';
}

Ternary ternary_from_char(char c) {
  switch (c) {
    case 'T': return Ternary::T;
    case 'F': return Ternary::F;
    case 'U': return Ternary::U;
    default: throw Error(ErrorKind::Schema, std::string("invalid ternary value '") + c + "'");
  }
}

namespace {

void check_value(const ConcreteState& s, const Value& v) {
  if (v.kind == Value::Kind::Ref && !s.objects.count(v.ref)) {
    throw Error(ErrorKind::StateReference, "undefined object id '" + v.ref + "'");
  }
  for (const auto& item : v.items) check_value(s, item);
}

}  // namespace

void validate_state(const ConcreteState& s) {
  for (const auto& [cls, id] : s.roots) {
    if (id && !s.objects.count(*id)) {
      throw Error(ErrorKind::StateReference, "undefined object id '" + *id + "' (root " + cls + ")");
    }
  }
  for (const auto& [id, obj] : s.objects) {
    for (const auto& [name, v] : obj.fields) check_value(s, v);
  }
}

std::string AbstractState::str() const {
  std::string out;
  out.reserve(values.size());
  for (Ternary v : values) out += to_char(v);
  return out;
}

std::string AbstractState::pretty() const {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += to_char(values[i]);
  }
  return out + ")";
}

AbstractState AbstractState::parse(std::string_view text, std::string af_hash) {
  AbstractState a;
  a.af_hash = std::move(af_hash);
  for (char c : text) a.values.push_back(ternary_from_char(c));
  return a;
}

namespace {

// Scalar outcome of a term; nullopt stands for unknown.
struct Scalar {
  bool is_bool = false;
  std::int64_t i = 0;
  bool b = false;
};

std::optional<Scalar> eval_state_path(const Term& t, const ConcreteState& s) {
  const auto root = s.roots.find(t.name);
  if (root == s.roots.end() || !root->second) return std::nullopt;
  auto obj_it = s.objects.find(*root->second);
  if (obj_it == s.objects.end()) return std::nullopt;

  Value cur;
  cur.kind = Value::Kind::Ref;
  cur.ref = *root->second;
  for (const auto& seg : t.path) {
    switch (seg.kind) {
      case PathSeg::Kind::Field: {
        if (cur.kind != Value::Kind::Ref) return std::nullopt;
        auto o = s.objects.find(cur.ref);
        if (o == s.objects.end()) return std::nullopt;
        auto f = o->second.fields.find(seg.field);
        if (f == o->second.fields.end()) return std::nullopt;
        cur = f->second;
        break;
      }
      case PathSeg::Kind::Index: {
        if (cur.kind != Value::Kind::Array) return std::nullopt;
        if (seg.index < 0 || static_cast<std::size_t>(seg.index) >= cur.items.size()) return std::nullopt;
        Value next = cur.items[static_cast<std::size_t>(seg.index)];
        cur = std::move(next);
        break;
      }
      case PathSeg::Kind::Length: {
        if (cur.kind != Value::Kind::Array) return std::nullopt;
        const auto n = static_cast<std::int64_t>(cur.items.size());
        cur = Value{};
        cur.kind = Value::Kind::Int;
        cur.int_value = n;
        break;
      }
    }
  }
  if (cur.kind == Value::Kind::Int) return Scalar{false, cur.int_value, false};
  if (cur.kind == Value::Kind::Bool) return Scalar{true, 0, cur.bool_value};
  return std::nullopt;
}

std::optional<Scalar> eval_term(const Term& t, const ConcreteState& s) {
  switch (t.kind) {
    case Term::Kind::IntLit:
    case Term::Kind::Const:
      return Scalar{false, t.int_value, false};
    case Term::Kind::BoolLit:
      return Scalar{true, 0, t.bool_value};
    case Term::Kind::State:
      return eval_state_path(t, s);
    case Term::Kind::Param:
    case Term::Kind::Opaque:
      return std::nullopt;
    case Term::Kind::Neg: {
      auto v = eval_term(*t.lhs, s);
      if (!v || v->is_bool || v->i == std::numeric_limits<std::int64_t>::min()) return std::nullopt;
      return Scalar{false, -v->i, false};
    }
    case Term::Kind::Arith: {
      auto a = eval_term(*t.lhs, s);
      auto b = eval_term(*t.rhs, s);
      if (!a || !b || a->is_bool || b->is_bool) return std::nullopt;
      // Reuse the folding rules of the term builder.
      TermPtr folded = Term::arith(t.op, Term::int_lit(a->i), Term::int_lit(b->i));
      if (folded->kind != Term::Kind::IntLit) return std::nullopt;
      return Scalar{false, folded->int_value, false};
    }
  }
  return std::nullopt;
}

}  // namespace

Ternary eval_clause(const Clause& c, const ConcreteState& s) {
  const auto l = eval_term(*c.lhs, s);
  const auto r = eval_term(*c.rhs, s);
  if (!l || !r || l->is_bool != r->is_bool) return Ternary::U;
  bool holds = false;
  if (l->is_bool) {
    if (c.op == ir::BinaryOp::Eq) {
      holds = l->b == r->b;
    } else if (c.op == ir::BinaryOp::Ne) {
      holds = l->b != r->b;
    } else {
      return Ternary::U;
    }
  } else {
    switch (c.op) {
      case ir::BinaryOp::Eq: holds = l->i == r->i; break;
      case ir::BinaryOp::Ne: holds = l->i != r->i; break;
      case ir::BinaryOp::Lt: holds = l->i < r->i; break;
      case ir::BinaryOp::Le: holds = l->i <= r->i; break;
      case ir::BinaryOp::Gt: holds = l->i > r->i; break;
      case ir::BinaryOp::Ge: holds = l->i >= r->i; break;
      default: return Ternary::U;
    }
  }
  const Ternary v = holds ? Ternary::T : Ternary::F;
  return c.negated ? negate(v) : v;
}

Ternary eval_function(const AbstractionFunction& af, const ConcreteState& s) {
  bool any_false = false;
  for (const auto& c : af.clauses) {
    const Ternary v = eval_clause(c, s);
    if (v == Ternary::U) return Ternary::U;
    if (v == Ternary::F) any_false = true;
  }
  return any_false ? Ternary::F : Ternary::T;
}

AbstractState abstract_state(const std::vector<AbstractionFunction>& afs, const ConcreteState& s) {
  AbstractState out;
  out.af_hash = af_list_hash(afs);
  out.values.reserve(afs.size());
  for (const auto& af : afs) out.values.push_back(eval_function(af, s));
  return out;
}

}  // namespace cbr
