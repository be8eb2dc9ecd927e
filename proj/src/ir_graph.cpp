#include <algorithm>
#include <deque>
#include <set>

#include "cbr/error.hpp"
#include "cbr/ir.hpp"

namespace cbr::ir {

std::size_t DependencyGraph::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] == name) return i;
  }
  return nodes.size();
}

bool DependencyGraph::has_edge(std::string_view from, std::string_view to) const {
  const std::size_t a = index_of(from);
  const std::size_t b = index_of(to);
  if (a == nodes.size() || b == nodes.size()) return false;
  return std::binary_search(edges[a].begin(), edges[a].end(), b);
}

std::size_t DependencyGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& e : edges) n += e.size();
  return n;
}

namespace {

// Collects every class an expression mentions: qualifiers, allocations, and
// the classes that field paths step through. The program is already checked,
// so lookups here cannot fail except on malformed input, which is skipped.
class RefCollector {
 public:
  RefCollector(const Program& p, const ClassDef& cls, const MethodDef* m, std::set<std::string>& out)
      : prog_(p), cls_(cls), method_(m), out_(out) {}

  void block(const Block& b) {
    for (const auto& s : b) stmt(s);
  }

  // Returns the class the expression's value belongs to, if any.
  std::string expr(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> std::string {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Expr::Name>) {
            if (std::find(loop_vars_.begin(), loop_vars_.end(), n.id) != loop_vars_.end()) return {};
            if (method_) {
              if (const Param* p = method_->find_param(n.id)) return note(p->type);
            }
            if (const FieldDef* f = cls_.find_field(n.id)) return note(f->type);
            if (cls_.find_const(n.id)) return {};
            if (prog_.find_class(n.id)) {
              out_.insert(n.id);
              return n.id;
            }
            return {};
          } else if constexpr (std::is_same_v<T, Expr::Member>) {
            const std::string owner = expr(*n.base);
            const ClassDef* c = prog_.find_class(owner);
            if (!c) return {};
            if (const FieldDef* f = c->find_field(n.field)) return note(f->type);
            return {};
          } else if constexpr (std::is_same_v<T, Expr::Index>) {
            expr(*n.index);
            return expr(*n.base);
          } else if constexpr (std::is_same_v<T, Expr::Length>) {
            expr(*n.base);
            return {};
          } else if constexpr (std::is_same_v<T, Expr::Unary>) {
            expr(*n.operand);
            return {};
          } else if constexpr (std::is_same_v<T, Expr::Binary>) {
            expr(*n.lhs);
            expr(*n.rhs);
            return {};
          } else if constexpr (std::is_same_v<T, Expr::NewArray>) {
            out_.insert(n.class_name);
            expr(*n.size);
            return n.class_name;
          } else {
            return {};
          }
        },
        e.node);
  }

 private:
  std::string note(const Type& t) {
    if (!t.references_class()) return {};
    out_.insert(t.class_name);
    return t.class_name;
  }

  void stmt(const Stmt& s) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Stmt::Assign>) {
            expr(*n.target);
            expr(*n.value);
          } else if constexpr (std::is_same_v<T, Stmt::If>) {
            expr(*n.cond);
            block(n.then_block);
            block(n.else_block);
          } else if constexpr (std::is_same_v<T, Stmt::For>) {
            expr(*n.array);
            loop_vars_.push_back(n.var);
            block(n.body);
            loop_vars_.pop_back();
          } else if constexpr (std::is_same_v<T, Stmt::Call>) {
            for (const auto& a : n.args) expr(*a);
          }
        },
        s.node);
  }

  const Program& prog_;
  const ClassDef& cls_;
  const MethodDef* method_;
  std::set<std::string>& out_;
  std::vector<std::string> loop_vars_;
};

}  // namespace

DependencyGraph build_dependency_graph(const Program& program) {
  DependencyGraph g;
  for (const auto& cls : program.classes) g.nodes.push_back(cls.name);
  g.edges.resize(g.nodes.size());

  for (std::size_t i = 0; i < program.classes.size(); ++i) {
    const ClassDef& cls = program.classes[i];
    std::set<std::string> refs;
    for (const auto& f : cls.fields) {
      if (f.type.references_class()) refs.insert(f.type.class_name);
    }
    for (const auto& m : cls.methods) {
      for (const auto& p : m.params) {
        if (p.type.references_class()) refs.insert(p.type.class_name);
      }
      RefCollector(program, cls, &m, refs).block(m.body);
    }
    for (const auto& r : refs) {
      const std::size_t j = g.index_of(r);
      if (j < g.nodes.size()) g.edges[i].push_back(j);
    }
    std::sort(g.edges[i].begin(), g.edges[i].end());
  }
  return g;
}

std::vector<std::string> detect_relevant_classes(const DependencyGraph& graph,
                                                 std::span<const std::string> targets) {
  std::vector<bool> seed(graph.nodes.size(), false);
  for (const auto& t : targets) {
    const std::size_t i = graph.index_of(t);
    if (i == graph.nodes.size()) {
      throw Error(ErrorKind::UnknownTarget, "unknown target class '" + t + "'");
    }
    seed[i] = true;
  }

  std::vector<bool> seen(graph.nodes.size(), false);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < seed.size(); ++i) {
    if (seed[i]) {
      seen[i] = true;
      queue.push_back(i);
    }
  }
  std::vector<std::string> order;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    order.push_back(graph.nodes[cur]);
    for (std::size_t next : graph.edges[cur]) {
      if (!seen[next]) {
        seen[next] = true;
        queue.push_back(next);
      }
    }
  }
  return order;
}

}  // namespace cbr::ir
