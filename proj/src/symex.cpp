#include <algorithm>
#include <set>
#include <variant>

#include "cbr/error.hpp"
#include "cbr/symex.hpp"

namespace cbr::symex {

void SymexBounds::validate() const {
  if (max_branches_per_path <= 0 || max_states <= 0 || per_method_time_budget.count() <= 0 ||
      max_loop_unroll <= 0) {
    throw Error(ErrorKind::Precondition, "symbolic execution bounds must be strictly positive");
  }
}

namespace {

using ir::BinaryOp;
using ir::Block;
using ir::ClassDef;
using ir::Expr;
using ir::MethodDef;
using ir::Program;
using ir::Stmt;
using ir::Type;

std::string path_key(const std::string& root, const std::vector<PathSeg>& path) {
  std::string s = root;
  for (const auto& seg : path) {
    switch (seg.kind) {
      case PathSeg::Kind::Field: s += "." + seg.field; break;
      case PathSeg::Kind::Index: s += "[" + std::to_string(seg.index) + "]"; break;
      case PathSeg::Kind::Length: s += ".length"; break;
    }
  }
  return s;
}

// An object or array reference.
struct Loc {
  enum class Base { State, ParamObj, Alloc, Null, Opaque };
  Base base = Base::Opaque;
  std::string root;
  std::vector<PathSeg> path;
  std::string cls;  // object class, or element class for arrays
  bool is_array = false;
  std::size_t alloc = 0;

  std::string key() const { return path_key(root, path); }
};

using SymValue = std::variant<TermPtr, Loc>;

struct Env {
  const ClassDef* cls = nullptr;
  const MethodDef* method = nullptr;
  std::map<std::string, SymValue> vars;  // parameters and loop variables
  int depth = 0;
};

struct Frame {
  enum class Kind { Block, Loop, Call };
  Kind kind = Kind::Block;
  const Block* block = nullptr;
  std::size_t next = 0;
  const Stmt::For* loop = nullptr;
  TermPtr len;
  std::int64_t k = 0;
  std::size_t env = 0;
};

struct Havoc {
  std::string prefix;
  int epoch = 0;
};

struct SymState {
  std::vector<Clause> clauses;
  std::set<std::string> rendered;
  std::set<std::string> refuted;  // renderings contradicted by some clause
  std::map<std::string, SymValue> store;
  std::vector<Havoc> havocs;
  std::vector<TermPtr> allocs;
  std::vector<Env> envs;
  std::vector<Frame> frames;
  int forks = 0;
  int epoch = 0;
};

struct Infeasible {};

bool under(const std::string& key, const std::string& prefix) {
  if (key.size() < prefix.size() || key.compare(0, prefix.size(), prefix) != 0) return false;
  return key.size() == prefix.size() || key[prefix.size()] == '.' || key[prefix.size()] == '[';
}

// nullopt: contradicts length non-negativity.
std::optional<Clause> length_axiom(Clause c) {
  if (!c.lhs->is_length() || c.rhs->kind != Term::Kind::IntLit) return c;
  const std::int64_t v = c.rhs->int_value;
  switch (c.op) {
    case BinaryOp::Lt:
      if (v <= 0) return std::nullopt;
      break;
    case BinaryOp::Le:
      if (v < 0) return std::nullopt;
      if (v == 0) c.op = BinaryOp::Eq;
      break;
    case BinaryOp::Eq:
      if (v < 0) return std::nullopt;
      break;
    case BinaryOp::Ne:
      if (v == 0) c.op = BinaryOp::Gt;
      break;
    default:
      break;
  }
  return c;
}

std::optional<bool> fold_literal(const Clause& c) {
  if (!c.lhs->is_literal() || !c.rhs->is_literal()) return std::nullopt;
  if (c.lhs->kind == Term::Kind::BoolLit) {
    const bool eq = c.lhs->bool_value == c.rhs->bool_value;
    return c.op == BinaryOp::Eq ? eq : !eq;
  }
  const std::int64_t a = c.lhs->int_value;
  const std::int64_t b = c.rhs->int_value;
  switch (c.op) {
    case BinaryOp::Eq: return a == b;
    case BinaryOp::Ne: return a != b;
    case BinaryOp::Lt: return a < b;
    case BinaryOp::Le: return a <= b;
    case BinaryOp::Gt: return a > b;
    case BinaryOp::Ge: return a >= b;
    default: return std::nullopt;
  }
}

struct Verdict {
  enum class Kind { Infeasible, Holds, Add };
  Kind kind;
  Clause clause;
};

Verdict classify(const SymState& s, const Clause& raw) {
  auto c = length_axiom(normalize(raw));
  if (!c) return {Verdict::Kind::Infeasible, raw};
  if (auto v = fold_literal(*c)) return {*v ? Verdict::Kind::Holds : Verdict::Kind::Infeasible, *c};
  const std::string r = render(*c);
  if (s.rendered.count(r)) return {Verdict::Kind::Holds, *c};
  if (s.refuted.count(r)) return {Verdict::Kind::Infeasible, *c};
  return {Verdict::Kind::Add, *c};
}

void add_clause(SymState& s, const Clause& c) {
  s.clauses.push_back(c);
  s.rendered.insert(render(c));
  if (auto inv = length_axiom(normalize(invert(c)))) s.refuted.insert(render(*inv));
}

struct Outcome {
  SymState state;
  bool value = false;
  bool truncated = false;
};

bool is_compound_bool(const Expr& e) {
  if (const auto* b = std::get_if<Expr::Binary>(&e.node)) {
    return ir::is_comparison(b->op) || b->op == BinaryOp::And || b->op == BinaryOp::Or;
  }
  if (const auto* u = std::get_if<Expr::Unary>(&e.node)) return u->op == ir::UnaryOp::Not;
  return false;
}

class Engine {
 public:
  Engine(const Program& p, const SymexBounds& b) : prog_(p), bounds_(b) {}

  MethodResult run(const ClassDef& cls, const MethodDef& method) {
    start_ = std::chrono::steady_clock::now();
    SymState init;
    Env env{&cls, &method, {}, 0};
    for (const auto& p : method.params) env.vars[p.name] = input_value(p.name, p.type);
    init.envs.push_back(std::move(env));
    init.frames.push_back(block_frame(method.body, 0));

    std::vector<SymState> work;
    work.push_back(std::move(init));
    while (!work.empty() && !stopped_) {
      SymState s = std::move(work.back());
      work.pop_back();
      explore(std::move(s), work, cls, method);
    }
    return std::move(result_);
  }

 private:
  static Frame block_frame(const Block& b, std::size_t env) {
    Frame f;
    f.kind = Frame::Kind::Block;
    f.block = &b;
    f.env = env;
    return f;
  }

  SymValue input_value(const std::string& label, const Type& t) const {
    if (t.is_scalar()) return Term::param(label);
    Loc l;
    l.base = Loc::Base::ParamObj;
    l.root = label;
    l.cls = t.class_name;
    l.is_array = t.kind == Type::Kind::RefArray;
    return l;
  }

  void stop(const char* reason) {
    stopped_ = true;
    result_.truncated = true;
    if (result_.truncation_reason.empty()) result_.truncation_reason = reason;
  }

  bool tick() {
    ++result_.states_explored;
    if (result_.states_explored > bounds_.max_states) {
      --result_.states_explored;
      stop("max_states");
      return false;
    }
    if (std::chrono::steady_clock::now() - start_ > bounds_.per_method_time_budget) {
      stop("time_budget");
      return false;
    }
    return true;
  }

  void emit(SymState& s, bool truncated, const ClassDef& cls, const MethodDef& m) {
    PathCondition pc;
    pc.clauses = std::move(s.clauses);
    pc.class_name = cls.name;
    pc.method = m.name;
    pc.path_id = result_.paths.size();
    pc.truncated = truncated;
    result_.max_forks_on_path = std::max(result_.max_forks_on_path, s.forks);
    if (truncated) {
      result_.truncated = true;
      if (result_.truncation_reason.empty()) result_.truncation_reason = "max_branches";
    }
    result_.paths.push_back(std::move(pc));
  }

  // Runs one path until it ends or forks. Forked continuations are pushed so
  // that the then-side is popped first.
  void explore(SymState s, std::vector<SymState>& work, const ClassDef& cls, const MethodDef& m) {
    for (;;) {
      if (s.frames.empty()) {
        emit(s, false, cls, m);
        return;
      }
      if (!tick()) return;
      std::vector<Outcome> next;
      try {
        next = step(std::move(s));
      } catch (const Infeasible&) {
        return;
      }
      if (next.empty()) return;
      if (next.size() == 1 && !next[0].truncated) {
        s = std::move(next[0].state);
        continue;
      }
      for (auto it = next.rbegin(); it != next.rend(); ++it) {
        if (it->truncated) {
          emit(it->state, true, cls, m);
        } else {
          work.push_back(std::move(it->state));
        }
      }
      return;
    }
  }

  // --- heap reads ----------------------------------------------------------

  const Havoc* havoc_for(const SymState& s, const std::string& key) const {
    const Havoc* best = nullptr;
    for (const auto& h : s.havocs) {
      if (under(key, h.prefix) && (!best || h.epoch > best->epoch)) best = &h;
    }
    return best;
  }

  static SymValue opaque_of(const std::string& label, const Type& t) {
    if (t.is_scalar()) return Term::opaque(label);
    Loc l;
    l.base = Loc::Base::Opaque;
    l.root = label;
    l.cls = t.class_name;
    l.is_array = t.kind == Type::Kind::RefArray;
    return l;
  }

  std::optional<SymValue> lookup(const SymState& s, const std::string& key, const Type& t) const {
    if (auto it = s.store.find(key); it != s.store.end()) return it->second;
    if (const Havoc* h = havoc_for(s, key)) {
      return opaque_of("?" + key + "#" + std::to_string(h->epoch), t);
    }
    return std::nullopt;
  }

  SymValue read_field(const SymState& s, const Loc& obj, const std::string& field) const {
    const ClassDef* c = prog_.find_class(obj.cls);
    const ir::FieldDef* f = c ? c->find_field(field) : nullptr;
    const Type t = f ? f->type : Type::integer();
    Loc child = obj;
    child.path.push_back({PathSeg::Kind::Field, field, 0});
    const std::string key = child.key();
    if (obj.base == Loc::Base::Null || obj.base == Loc::Base::Opaque || obj.base == Loc::Base::Alloc ||
        obj.is_array) {
      if (auto v = lookup(s, key, t)) return *v;
      return opaque_of("?" + key, t);
    }
    if (auto v = lookup(s, key, t)) return *v;
    if (obj.base == Loc::Base::ParamObj) return input_value(key, t);
    if (t.is_scalar()) return Term::state(obj.root, child.path);
    child.cls = t.class_name;
    child.is_array = t.kind == Type::Kind::RefArray;
    return child;
  }

  SymValue read_element(const SymState& s, const Loc& arr, std::int64_t k) const {
    const Type t = Type::ref(arr.cls);
    Loc child = arr;
    child.is_array = false;
    child.path.push_back({PathSeg::Kind::Index, {}, k});
    const std::string key = child.key();
    if (auto v = lookup(s, key, t)) return *v;
    switch (arr.base) {
      case Loc::Base::State:
      case Loc::Base::ParamObj:
        return child;
      case Loc::Base::Alloc:
        child.base = Loc::Base::Null;
        return child;
      default:
        return opaque_of("?" + key, t);
    }
  }

  TermPtr length_of(const SymState& s, const Loc& arr) const {
    const std::string key = arr.key() + ".length";
    switch (arr.base) {
      case Loc::Base::State: {
        if (const Havoc* h = havoc_for(s, key)) {
          return Term::opaque("?" + key + "#" + std::to_string(h->epoch));
        }
        auto path = arr.path;
        path.push_back({PathSeg::Kind::Length, {}, 0});
        return Term::state(arr.root, std::move(path));
      }
      case Loc::Base::ParamObj:
        return Term::param(key);
      case Loc::Base::Alloc:
        return s.allocs[arr.alloc];
      default:
        return Term::opaque("?" + key);
    }
  }

  static Loc this_loc(const ClassDef& cls) {
    Loc l;
    l.base = Loc::Base::State;
    l.root = cls.name;
    l.cls = cls.name;
    return l;
  }

  // --- expressions ---------------------------------------------------------

  static TermPtr as_term(const SymValue& v) {
    if (const auto* t = std::get_if<TermPtr>(&v)) return *t;
    return Term::opaque("?ref");
  }

  static Loc as_loc(const SymValue& v) {
    if (const auto* l = std::get_if<Loc>(&v)) return *l;
    return Loc{};
  }

  bool is_class_qualifier(const Expr& e, const Env& env) const {
    const auto* n = std::get_if<Expr::Name>(&e.node);
    if (!n || env.vars.count(n->id) || env.cls->find_field(n->id) || env.cls->find_const(n->id)) {
      return false;
    }
    return prog_.find_class(n->id) != nullptr;
  }

  SymValue eval(const Expr& e, SymState& s, std::size_t env_idx) {
    const Env& env = s.envs[env_idx];
    return std::visit(
        [&](const auto& n) -> SymValue {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Expr::IntLit>) {
            return Term::int_lit(n.value);
          } else if constexpr (std::is_same_v<T, Expr::BoolLit>) {
            return Term::bool_lit(n.value);
          } else if constexpr (std::is_same_v<T, Expr::Name>) {
            if (auto it = env.vars.find(n.id); it != env.vars.end()) return it->second;
            if (env.cls->find_field(n.id)) return read_field(s, this_loc(*env.cls), n.id);
            if (const ir::ConstDef* k = env.cls->find_const(n.id)) {
              return Term::constant(env.cls->name + "." + k->name, k->value);
            }
            return Term::opaque("?" + n.id);
          } else if constexpr (std::is_same_v<T, Expr::Member>) {
            if (is_class_qualifier(*n.base, env)) {
              const std::string& cname = std::get<Expr::Name>(n.base->node).id;
              const ClassDef* c = prog_.find_class(cname);
              if (const ir::ConstDef* k = c->find_const(n.field)) {
                return Term::constant(cname + "." + k->name, k->value);
              }
              return read_field(s, this_loc(*c), n.field);
            }
            const Loc base = as_loc(eval(*n.base, s, env_idx));
            const ClassDef* c = prog_.find_class(base.cls);
            if (c && !c->find_field(n.field)) {
              if (const ir::ConstDef* k = c->find_const(n.field)) {
                return Term::constant(c->name + "." + k->name, k->value);
              }
            }
            return read_field(s, base, n.field);
          } else if constexpr (std::is_same_v<T, Expr::Index>) {
            const Loc base = as_loc(eval(*n.base, s, env_idx));
            const TermPtr idx = as_term(eval(*n.index, s, env_idx));
            if (idx->kind != Term::Kind::IntLit) return opaque_of("?elem", Type::ref(base.cls));
            return read_element(s, base, idx->int_value);
          } else if constexpr (std::is_same_v<T, Expr::Length>) {
            return length_of(s, as_loc(eval(*n.base, s, env_idx)));
          } else if constexpr (std::is_same_v<T, Expr::Unary>) {
            if (n.op == ir::UnaryOp::Neg) return Term::neg(as_term(eval(*n.operand, s, env_idx)));
            return Term::opaque("?bool");
          } else if constexpr (std::is_same_v<T, Expr::Binary>) {
            if (!ir::is_arithmetic(n.op)) return Term::opaque("?bool");
            TermPtr l = as_term(eval(*n.lhs, s, env_idx));
            TermPtr r = as_term(eval(*n.rhs, s, env_idx));
            return Term::arith(n.op, std::move(l), std::move(r));
          } else if constexpr (std::is_same_v<T, Expr::NewArray>) {
            TermPtr size = as_term(eval(*n.size, s, env_idx));
            // Negative sizes would throw at run time; the IR has no exceptions,
            // so the surviving path simply assumes a valid size.
            const Verdict v = classify(s, Clause{size, BinaryOp::Ge, Term::int_lit(0), false});
            if (v.kind == Verdict::Kind::Infeasible) throw Infeasible{};
            if (v.kind == Verdict::Kind::Add) add_clause(s, v.clause);
            Loc l;
            l.base = Loc::Base::Alloc;
            l.root = "new#" + std::to_string(s.allocs.size());
            l.cls = n.class_name;
            l.is_array = true;
            l.alloc = s.allocs.size();
            s.allocs.push_back(size);
            return l;
          }
        },
        e.node);
  }

  // Store key for an assignment target.
  std::string lvalue_key(const Expr& e, SymState& s, std::size_t env_idx) {
    const Env& env = s.envs[env_idx];
    if (const auto* n = std::get_if<Expr::Name>(&e.node)) return env.cls->name + "." + n->id;
    if (const auto* m = std::get_if<Expr::Member>(&e.node)) {
      if (is_class_qualifier(*m->base, env)) {
        return std::get<Expr::Name>(m->base->node).id + "." + m->field;
      }
      return as_loc(eval(*m->base, s, env_idx)).key() + "." + m->field;
    }
    if (const auto* ix = std::get_if<Expr::Index>(&e.node)) {
      const Loc base = as_loc(eval(*ix->base, s, env_idx));
      const TermPtr idx = as_term(eval(*ix->index, s, env_idx));
      if (idx->kind != Term::Kind::IntLit) return "?";
      return base.key() + "[" + std::to_string(idx->int_value) + "]";
    }
    return "?";
  }

  // --- branching -----------------------------------------------------------

  std::vector<Outcome> branch(SymState s, const Clause& then_c, const Clause& else_c) {
    const Verdict t = classify(s, then_c);
    const Verdict f = classify(s, else_c);
    const bool t_ok = t.kind != Verdict::Kind::Infeasible;
    const bool f_ok = f.kind != Verdict::Kind::Infeasible;
    std::vector<Outcome> out;
    if (t_ok && f_ok) {
      if (s.forks >= bounds_.max_branches_per_path) {
        out.push_back({std::move(s), false, true});
        return out;
      }
      ++s.forks;
      SymState other = s;
      if (t.kind == Verdict::Kind::Add) add_clause(s, t.clause);
      if (f.kind == Verdict::Kind::Add) add_clause(other, f.clause);
      out.push_back({std::move(s), true, false});
      out.push_back({std::move(other), false, false});
      return out;
    }
    if (t_ok) {
      if (t.kind == Verdict::Kind::Add) add_clause(s, t.clause);
      out.push_back({std::move(s), true, false});
    } else if (f_ok) {
      if (f.kind == Verdict::Kind::Add) add_clause(s, f.clause);
      out.push_back({std::move(s), false, false});
    }
    return out;
  }

  std::vector<Outcome> decide(const Expr& e, SymState s, std::size_t env_idx) {
    if (const auto* b = std::get_if<Expr::Binary>(&e.node)) {
      if (b->op == BinaryOp::And || b->op == BinaryOp::Or) {
        const bool short_value = b->op == BinaryOp::Or;
        std::vector<Outcome> out;
        for (auto& first : decide(*b->lhs, std::move(s), env_idx)) {
          if (first.truncated || first.value == short_value) {
            out.push_back(std::move(first));
            continue;
          }
          for (auto& second : decide(*b->rhs, std::move(first.state), env_idx)) {
            out.push_back(std::move(second));
          }
        }
        return out;
      }
      if (ir::is_comparison(b->op)) {
        TermPtr l = as_term(eval(*b->lhs, s, env_idx));
        TermPtr r = as_term(eval(*b->rhs, s, env_idx));
        const Clause c{std::move(l), b->op, std::move(r), false};
        return branch(std::move(s), c, invert(c));
      }
    }
    if (const auto* u = std::get_if<Expr::Unary>(&e.node)) {
      if (u->op == ir::UnaryOp::Not) {
        auto out = decide(*u->operand, std::move(s), env_idx);
        for (auto& o : out) o.value = !o.value;
        return out;
      }
    }
    if (const auto* lit = std::get_if<Expr::BoolLit>(&e.node)) {
      std::vector<Outcome> out;
      out.push_back({std::move(s), lit->value, false});
      return out;
    }
    TermPtr t = as_term(eval(e, s, env_idx));
    const Clause c{std::move(t), BinaryOp::Eq, Term::bool_lit(true), false};
    return branch(std::move(s), c, invert(c));
  }

  // --- havoc ---------------------------------------------------------------

  void assigned_roots(const ClassDef& cls, const Block& b, std::set<std::string>& out,
                      std::set<std::string>& visited) const {
    for (const auto& st : b) {
      if (const auto* a = std::get_if<Stmt::Assign>(&st.node)) {
        const Expr* e = a->target.get();
        const Expr* prev = nullptr;
        for (;;) {
          if (const auto* m = std::get_if<Expr::Member>(&e->node)) {
            prev = e;
            e = m->base.get();
          } else if (const auto* ix = std::get_if<Expr::Index>(&e->node)) {
            prev = e;
            e = ix->base.get();
          } else {
            break;
          }
        }
        if (const auto* n = std::get_if<Expr::Name>(&e->node)) {
          if (cls.find_field(n->id)) {
            out.insert(n->id);
          } else if (prev && prog_.find_class(n->id) == &cls) {
            if (const auto* m = std::get_if<Expr::Member>(&prev->node)) out.insert(m->field);
          }
        }
      } else if (const auto* i = std::get_if<Stmt::If>(&st.node)) {
        assigned_roots(cls, i->then_block, out, visited);
        assigned_roots(cls, i->else_block, out, visited);
      } else if (const auto* f = std::get_if<Stmt::For>(&st.node)) {
        assigned_roots(cls, f->body, out, visited);
      } else if (const auto* c = std::get_if<Stmt::Call>(&st.node)) {
        if (visited.insert(c->method).second) {
          if (const MethodDef* callee = cls.find_method(c->method)) {
            assigned_roots(cls, callee->body, out, visited);
          }
        }
      }
    }
  }

  void havoc_roots(SymState& s, const ClassDef& cls, const Block& b, const std::string& seed_method) {
    std::set<std::string> roots;
    std::set<std::string> visited;
    if (!seed_method.empty()) visited.insert(seed_method);
    assigned_roots(cls, b, roots, visited);
    for (const auto& r : roots) {
      const std::string prefix = cls.name + "." + r;
      ++s.epoch;
      for (auto it = s.store.begin(); it != s.store.end();) {
        it = under(it->first, prefix) ? s.store.erase(it) : std::next(it);
      }
      s.havocs.push_back({prefix, s.epoch});
    }
  }

  // --- statements ----------------------------------------------------------

  static std::vector<Outcome> single(SymState s) {
    std::vector<Outcome> out;
    out.push_back({std::move(s), false, false});
    return out;
  }

  static void do_return(SymState& s) {
    while (!s.frames.empty()) {
      const bool call = s.frames.back().kind == Frame::Kind::Call;
      s.frames.pop_back();
      if (call) return;
    }
  }

  std::vector<Outcome> step(SymState s) {
    Frame& top = s.frames.back();
    if (top.kind == Frame::Kind::Call) {
      s.frames.pop_back();
      return single(std::move(s));
    }
    if (top.kind == Frame::Kind::Loop) return step_loop(std::move(s));
    if (top.next == top.block->size()) {
      s.frames.pop_back();
      return single(std::move(s));
    }
    const Stmt& st = (*top.block)[top.next++];
    const std::size_t env_idx = top.env;

    if (const auto* a = std::get_if<Stmt::Assign>(&st.node)) {
      const std::string key = lvalue_key(*a->target, s, env_idx);
      if (is_compound_bool(*a->value)) {
        auto outs = decide(*a->value, std::move(s), env_idx);
        for (auto& o : outs) {
          if (!o.truncated) o.state.store[key] = Term::bool_lit(o.value);
        }
        return outs;
      }
      SymValue v = eval(*a->value, s, env_idx);
      s.store[key] = std::move(v);
      return single(std::move(s));
    }
    if (const auto* i = std::get_if<Stmt::If>(&st.node)) {
      auto outs = decide(*i->cond, std::move(s), env_idx);
      for (auto& o : outs) {
        if (o.truncated) continue;
        const Block& b = o.value ? i->then_block : i->else_block;
        if (!b.empty()) o.state.frames.push_back(block_frame(b, env_idx));
      }
      return outs;
    }
    if (const auto* f = std::get_if<Stmt::For>(&st.node)) {
      const Loc arr = as_loc(eval(*f->array, s, env_idx));
      Frame lf;
      lf.kind = Frame::Kind::Loop;
      lf.loop = f;
      lf.len = length_of(s, arr);
      lf.env = env_idx;
      s.frames.push_back(std::move(lf));
      return single(std::move(s));
    }
    if (std::holds_alternative<Stmt::Return>(st.node)) {
      do_return(s);
      return single(std::move(s));
    }
    const auto& call = std::get<Stmt::Call>(st.node);
    const Env& env = s.envs[env_idx];
    const MethodDef* callee = env.cls->find_method(call.method);
    if (env.depth < 1) {
      Env inner{env.cls, callee, {}, env.depth + 1};
      for (std::size_t k = 0; k < callee->params.size(); ++k) {
        const Expr& arg = *call.args[k];
        inner.vars[callee->params[k].name] =
            is_compound_bool(arg) ? SymValue(Term::opaque("?bool")) : eval(arg, s, env_idx);
      }
      s.envs.push_back(std::move(inner));
      Frame cf;
      cf.kind = Frame::Kind::Call;
      s.frames.push_back(cf);
      s.frames.push_back(block_frame(callee->body, s.envs.size() - 1));
      return single(std::move(s));
    }
    havoc_roots(s, *env.cls, callee->body, callee->name);
    return single(std::move(s));
  }

  std::vector<Outcome> step_loop(SymState s) {
    Frame& lf = s.frames.back();
    const Stmt::For& loop = *lf.loop;
    const std::size_t env_idx = lf.env;
    auto enter = [&](SymState& st) {
      Frame& f = st.frames.back();
      st.envs[env_idx].vars[loop.var] = Term::int_lit(f.k);
      ++f.k;
      if (!loop.body.empty()) st.frames.push_back(block_frame(loop.body, env_idx));
    };
    auto leave = [&](SymState& st) {
      st.envs[env_idx].vars.erase(loop.var);
      st.frames.pop_back();
    };

    if (lf.len->kind == Term::Kind::IntLit) {
      if (lf.k < lf.len->int_value) {
        enter(s);
      } else {
        leave(s);
      }
      return single(std::move(s));
    }
    if (lf.k >= bounds_.max_loop_unroll) {
      havoc_roots(s, *s.envs[env_idx].cls, loop.body, {});
      leave(s);
      return single(std::move(s));
    }
    const TermPtr len = lf.len;
    const TermPtr k = Term::int_lit(lf.k);
    auto outs = branch(std::move(s), Clause{len, BinaryOp::Gt, k, false},
                       Clause{len, BinaryOp::Eq, k, false});
    for (auto& o : outs) {
      if (o.truncated) continue;
      if (o.value) {
        enter(o.state);
      } else {
        leave(o.state);
      }
    }
    return outs;
  }

  const Program& prog_;
  const SymexBounds& bounds_;
  MethodResult result_;
  std::chrono::steady_clock::time_point start_;
  bool stopped_ = false;
};

}  // namespace

MethodResult symbolic_execute(const ir::Program& program, std::string_view class_name,
                              std::string_view method, const SymexBounds& bounds) {
  bounds.validate();
  const ir::ClassDef* cls = program.find_class(class_name);
  if (!cls) {
    throw Error(ErrorKind::Precondition, "unknown class '" + std::string(class_name) + "'");
  }
  const ir::MethodDef* m = cls->find_method(method);
  if (!m) {
    throw Error(ErrorKind::Precondition,
                "unknown method '" + std::string(class_name) + "." + std::string(method) + "'");
  }
  return Engine(program, bounds).run(*cls, *m);
}

std::optional<AbstractionFunction> strip_parameter_clauses(const PathCondition& pc) {
  AbstractionFunction af;
  af.class_name = pc.class_name;
  af.method = pc.method;
  for (const auto& c : pc.clauses) {
    if (!mentions_input(*c.lhs) && !mentions_input(*c.rhs)) af.clauses.push_back(c);
  }
  if (af.clauses.empty()) return std::nullopt;
  return af;
}

}  // namespace cbr::symex
