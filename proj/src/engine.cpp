#include "logicweb/engine.hpp"

#include <pthread.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <unordered_map>

#include "logicweb/syntax.hpp"

namespace logicweb {

ExprPtr policy_intersection(const PolicySet& sigma) {
  std::vector<ExprPtr> parts;
  parts.reserve(sigma.size());
  for (const auto& p : sigma) parts.push_back(Expr::encapsulate(Expr::program(p)));
  return Expr::reduce('*', std::move(parts));
}

namespace {

thread_local bool on_large_stack = false;

struct StackJob {
  const std::function<void()>* fn;
  std::exception_ptr error;
};

void* stack_trampoline(void* arg) {
  auto* job = static_cast<StackJob*>(arg);
  on_large_stack = true;
  try {
    (*job->fn)();
  } catch (...) {
    job->error = std::current_exception();
  }
  return nullptr;
}

const Term& true_atom() {
  static const Term t = Term::atom("true");
  return t;
}

struct Number {
  bool is_int = true;
  std::int64_t i = 0;
  double d = 0;

  double as_double() const { return is_int ? static_cast<double>(i) : d; }
  Term term() const { return is_int ? Term::integer(i) : Term::decimal(d); }
};

Number int_num(std::int64_t v) { return {true, v, 0}; }
Number float_num(double v) { return {false, 0, v}; }

int compare_numbers(const Number& a, const Number& b) {
  if (a.is_int && b.is_int) return a.i < b.i ? -1 : (a.i > b.i ? 1 : 0);
  double x = a.as_double();
  double y = b.as_double();
  return x < y ? -1 : (x > y ? 1 : 0);
}

}  // namespace

void run_with_large_stack(const std::function<void()>& fn, std::size_t stack_bytes) {
  if (on_large_stack) {
    fn();
    return;
  }
  StackJob job{&fn, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, stack_bytes);
  pthread_t thread;
  int rc = pthread_create(&thread, &attr, stack_trampoline, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    fn();
    return;
  }
  pthread_join(thread, nullptr);
  if (job.error) std::rethrow_exception(job.error);
}

// ---------------------------------------------------------------------------

struct Frame {
  const PolicySet* sigma;
  ExprPtr ctx;
  std::uint64_t cut_barrier;
  const AncestorNode* anc;
  std::size_t depth;
  const ContextNode* ctxseq;
};

using ClauseCont = FunctionRef<Signal(const Term&)>;

// One derivation: the binding trail plus the proof procedure.
class Prover : public BuiltinContext {
 public:
  explicit Prover(Engine& e) : e_(e) {}

  std::optional<TerminationReason> terminated;

  Signal prove(const Term& goal, const Frame& f, Cont k);

  enum class Once { Found, NotFound, Stopped };
  Once prove_once(const Term& goal, const Frame& f);

  Bindings& bindings() { return b_; }
  std::uint64_t new_barrier() { return ++barriers_; }

  // BuiltinContext
  Term deref(const Term& t) const override { return b_.deref(t); }
  Term resolve(const Term& t) const override { return b_.resolve(t); }
  bool unify(const Term& a, const Term& b) override { return logicweb::unify(a, b, b_, e_.config_.occurs_check); }
  Bindings::Mark mark() const override { return b_.mark(); }
  void undo(Bindings::Mark m) override { b_.undo(m); }
  Host& host() override { return e_.host_; }
  ProgramStore& store() override { return e_.store_; }
  std::shared_ptr<LWProgram> writable_program() override {
    if (!builtin_ctx_ || builtin_ctx_->kind != Expr::Kind::Id) return nullptr;
    if (!e_.registry_.is_policy(*builtin_ctx_->id)) return nullptr;
    return e_.store_.find(*builtin_ctx_->id);
  }

 private:
  struct DepthScope {
    explicit DepthScope(Prover& p) : p_(p) {
      if (++p_.native_depth_ > p_.e_.config_.max_native_depth) {
        --p_.native_depth_;
        throw EvaluationError("resource error: derivation nested too deeply");
      }
    }
    ~DepthScope() { --p_.native_depth_; }
    Prover& p_;
  };

  bool cancelled() const { return e_.cancel_ && e_.cancel_->cancelled(); }
  Signal stop_with(TerminationReason r) {
    if (!terminated) terminated = r;
    return Signal::stop();
  }
  bool is_policy_context(const Expr& ctx) const;

  Signal unify_then(const Term& a, const Term& b, Cont k);
  Signal if_then_else(const Term& c, const Term& t, const Term* e, const Frame& f, Cont k);
  Signal call_opaque(const Term& g, const Frame& f, Cont k);
  Signal call_user(const Term& g, const Frame& f, Cont k);
  Signal select_clause(const Frame& f, const ExprPtr& e, const Term& g, ClauseCont kc);
  Signal context_switch(const Term& fterm, const Term& g, const Frame& f, Cont k);
  Signal system_call(const Term& g, const BuiltinSpec& spec, const Frame& f, Cont k);
  Signal builtin_gate(const Term& g, const Frame& f, Cont k);
  Signal run_builtin(const BuiltinSpec& spec, const Term& g, const Frame& f, Cont k);
  std::optional<Signal> core(const Term& g, const Frame& f, Cont k);
  // Installs the missing ids; nullopt means all present, otherwise the signal to return.
  std::optional<Signal> ensure_programs(const std::vector<ProgramId>& ids, const Frame& f);

  Number eval(const Term& t) const;

  Engine& e_;
  Bindings b_;
  std::uint64_t barriers_ = 0;
  std::size_t native_depth_ = 0;
  const Expr* builtin_ctx_ = nullptr;
};

bool Prover::is_policy_context(const Expr& ctx) const {
  auto ids = expids(ctx);
  if (ids.empty()) return false;
  return std::all_of(ids.begin(), ids.end(), [&](const ProgramId& id) { return e_.registry_.is_policy(id); });
}

Signal Prover::unify_then(const Term& a, const Term& b, Cont k) {
  auto m = b_.mark();
  Signal s = Signal::next();
  if (unify(a, b)) s = k();
  b_.undo(m);
  return s;
}

Prover::Once Prover::prove_once(const Term& goal, const Frame& f) {
  std::uint64_t found = new_barrier();
  Frame of = f;
  of.cut_barrier = new_barrier();
  auto k = [found] { return Signal::cut(found); };
  Signal s = prove(goal, of, k);
  if (s.kind == Signal::Cut && s.barrier == found) return Once::Found;
  if (s.kind == Signal::Stop) return Once::Stopped;
  return Once::NotFound;
}

Signal Prover::prove(const Term& goal, const Frame& f, Cont k) {
  DepthScope scope(*this);
  if (cancelled()) return stop_with(TerminationReason::TimedOut);
  Term g = b_.deref(goal);
  if (g.is_var()) throw EvaluationError("instantiation error: unbound goal");
  if (!g.is_callable()) throw EvaluationError("type error: callable expected, found " + to_string(g));
  const std::string& name = g.name();
  std::size_t arity = g.arity();

  if (arity == 0) {
    if (name == "true") return k();
    if (name == "fail" || name == "false") return Signal::next();
    if (name == "!") {
      Signal s = k();
      if (s.is_next()) return Signal::cut(f.cut_barrier);
      return s;
    }
  } else if (arity == 2) {
    if (name == ",") {
      const Term& rhs = g.arg(1);
      auto rest = [&] { return prove(rhs, f, k); };
      return prove(g.arg(0), f, rest);
    }
    if (name == ";") {
      Term lhs = b_.deref(g.arg(0));
      if (lhs.is_functor("->", 2)) return if_then_else(lhs.arg(0), lhs.arg(1), &g.arg(1), f, k);
      Signal s = prove(lhs, f, k);
      if (!s.is_next()) return s;
      return prove(g.arg(1), f, k);
    }
    if (name == "->") return if_then_else(g.arg(0), g.arg(1), nullptr, f, k);
    if (name == "#>") return context_switch(g.arg(0), g.arg(1), f, k);
    if (name == ":" && b_.deref(g.arg(0)).is_atom("built_ins")) return builtin_gate(g, f, k);
  } else if (arity == 1 && name == "call") {
    return call_opaque(g.arg(0), f, k);
  }

  if (auto s = core(g, f, k)) return *s;
  if (const BuiltinSpec* spec = builtin_lookup(g)) return system_call(g, *spec, f, k);
  return call_user(g, f, k);
}

Signal Prover::if_then_else(const Term& c, const Term& t, const Term* e, const Frame& f, Cont k) {
  std::uint64_t bar = new_barrier();
  bool committed = false;
  Frame cf = f;
  cf.cut_barrier = new_barrier();
  auto then_branch = [&] {
    committed = true;
    Signal s = prove(t, f, k);
    if (s.is_next()) return Signal::cut(bar);
    return s;
  };
  Signal s = prove(c, cf, then_branch);
  if (s.kind == Signal::Cut && s.barrier == bar) return Signal::next();
  if (s.kind == Signal::Cut && s.barrier == cf.cut_barrier) s = Signal::next();
  if (!s.is_next() || committed) return s;
  if (!e) return Signal::next();
  return prove(*e, f, k);
}

Signal Prover::call_opaque(const Term& g, const Frame& f, Cont k) {
  Frame cf = f;
  cf.cut_barrier = new_barrier();
  Signal s = prove(g, cf, k);
  if (s.kind == Signal::Cut && s.barrier == cf.cut_barrier) return Signal::next();
  return s;
}

// ------------------------------------------------------------- user clauses

Signal Prover::call_user(const Term& g, const Frame& f, Cont k) {
  std::uint64_t bar = new_barrier();
  AncestorNode self{f.ctx, b_.resolve(g), f.anc};
  auto on_clause = [&](const Term& body) -> Signal {
    ClauseEvent ev{f.ctx, b_.resolve(g), f.depth, f.anc};
    for (Observer* o : e_.observers_) {
      if (auto r = o->on_clause(ev)) return stop_with(*r);
    }
    if (cancelled()) return stop_with(TerminationReason::TimedOut);
    Frame bf{f.sigma, f.ctx, bar, &self, f.depth + 1, f.ctxseq};
    return prove(body, bf, k);
  };
  Signal s = select_clause(f, f.ctx, g, on_clause);
  if (s.kind == Signal::Cut && s.barrier == bar) return Signal::next();
  return s;
}

Signal Prover::select_clause(const Frame& f, const ExprPtr& e, const Term& g, ClauseCont kc) {
  switch (e->kind) {
    case Expr::Kind::Empty:
      return Signal::next();
    case Expr::Kind::Current:
      throw EvaluationError("unresolved current-context operator in context");
    case Expr::Kind::Id: {
      auto prog = e_.store_.find(*e->id);
      if (!prog) return Signal::next();
      auto clauses = prog->snapshot();
      for (const Clause& c : *clauses) {
        if (c.head.name() != g.name() || c.head.arity() != g.arity()) continue;
        std::unordered_map<VarId, Term> renaming;
        Term head = rename_apart(c.head, renaming);
        Term body = rename_apart(c.body, renaming);
        auto m = b_.mark();
        Signal s = Signal::next();
        if (unify(head, g)) s = kc(body);
        b_.undo(m);
        if (!s.is_next()) return s;
      }
      return Signal::next();
    }
    case Expr::Kind::Union: {
      Signal s = select_clause(f, e->children[0], g, kc);
      if (!s.is_next()) return s;
      return select_clause(f, e->children[1], g, kc);
    }
    case Expr::Kind::Intersection: {
      const ExprPtr& right = e->children[1];
      auto left_clause = [&](const Term& b1) -> Signal {
        auto right_clause = [&](const Term& b2) -> Signal { return kc(Term::compound(",", {b1, b2})); };
        return select_clause(f, right, g, right_clause);
      };
      return select_clause(f, e->children[0], g, left_clause);
    }
    case Expr::Kind::Restriction: {
      const Expr& p = *e->children[1];
      if (p.kind != Expr::Kind::Id) throw EvaluationError("restriction operand is not a program identifier");
      auto prog = e_.store_.find(*p.id);
      if (prog && prog->defines(g.name(), g.arity())) return Signal::next();
      return select_clause(f, e->children[0], g, kc);
    }
    case Expr::Kind::Encapsulation: {
      Frame inner = f;
      inner.ctx = e->children[0];
      inner.cut_barrier = new_barrier();
      auto proved = [&] { return kc(true_atom()); };
      Signal s = call_user(g, inner, proved);
      if (s.kind == Signal::Cut && s.barrier == inner.cut_barrier) return Signal::next();
      return s;
    }
    case Expr::Kind::ReduceRestrict: {
      ExprPtr acc = e->children[0];
      for (std::size_t i = 1; i < e->children.size(); ++i) acc = Expr::restrict(acc, e->children[i]);
      return select_clause(f, acc, g, kc);
    }
    case Expr::Kind::ReduceOp: {
      ExprPtr acc = e->children[0];
      for (std::size_t i = 1; i < e->children.size(); ++i) {
        acc = e->op == '+' ? Expr::unite(acc, e->children[i]) : Expr::intersect(acc, e->children[i]);
      }
      return select_clause(f, acc, g, kc);
    }
  }
  return Signal::next();
}

// --------------------------------------------------------- context switching

std::optional<Signal> Prover::ensure_programs(const std::vector<ProgramId>& ids, const Frame& f) {
  std::vector<ProgramId> missing;
  for (const auto& id : ids) {
    if (!e_.store_.contains(id)) missing.push_back(id);
  }
  if (missing.empty()) return std::nullopt;
  if (!e_.fetcher_) return Signal::next();
  std::vector<ExprPtr> contexts;
  bool have_contexts = false;
  auto before = [&](const ProgramId& id) {
    if (!have_contexts) {
      contexts = context_sequence(f.ctxseq);
      have_contexts = true;
    }
    FetchEvent ev{id, f.ctx, *f.sigma, contexts, e_.registry_.is_policy(id)};
    for (Observer* o : e_.observers_) o->on_fetch(ev);
    return !cancelled();
  };
  auto after = [&](const ProgramId& id, const FetchOutcome& out) {
    if (!out.ok() || out.cache_hit) return true;
    for (const auto& w : out.warnings) e_.host_.warn(id.to_string() + ": " + w);
    for (Observer* o : e_.observers_) {
      if (auto r = o->on_program_created(id)) {
        stop_with(*r);
        return false;
      }
    }
    return true;
  };
  auto result = e_.fetcher_->add_programs(e_.store_, missing, before, after);
  if (terminated) return Signal::stop();
  if (cancelled()) return stop_with(TerminationReason::TimedOut);
  for (const auto& [id, out] : result.failures) {
    e_.host_.warn("cannot load " + id.to_string() + ": " + out.diagnostic);
  }
  if (!result.all_present) return Signal::next();
  return std::nullopt;
}

Signal Prover::context_switch(const Term& fterm, const Term& g, const Frame& f, Cont k) {
  ExprPtr target;
  try {
    target = insert_current_context(expr_from_term(b_.resolve(fterm)), f.ctx);
  } catch (const ExprError& err) {
    throw EvaluationError(std::string("malformed program expression: ") + err.what());
  }
  std::vector<ProgramId> ids = expids(*target);
  std::vector<ProgramId> nonpolicy;
  for (const auto& id : ids) {
    if (!e_.registry_.is_policy(id)) nonpolicy.push_back(id);
  }
  const bool secure = e_.config_.security_enabled && !f.sigma->empty();
  static const PolicySet no_policies;

  if (secure && !nonpolicy.empty()) {
    std::vector<ProgramId> sorted = nonpolicy;
    std::sort(sorted.begin(), sorted.end());
    Term checks;
    for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
      Term one = Term::compound("valid_program", {it->method_term(), Term::string(it->url())});
      checks = it == sorted.rbegin() ? one : Term::compound(",", {one, checks});
    }
    Term query = Term::compound("#>", {expr_to_term(*policy_intersection(*f.sigma)), checks});
    ContextNode fresh{Expr::empty(), nullptr};
    Frame pf{&no_policies, Expr::empty(), 0, f.anc, f.depth, &fresh};
    Once r = prove_once(query, pf);
    if (r == Once::Stopped) return Signal::stop();
    if (r == Once::NotFound) return Signal::next();
    ProgramAllowedEvent ev{sorted, *f.sigma};
    for (Observer* o : e_.observers_) o->on_program_allowed(ev);
  }

  if (auto s = ensure_programs(ids, f)) return *s;

  PolicySet sigma = *f.sigma;
  if (e_.config_.security_enabled && !nonpolicy.empty()) {
    std::vector<ProgramId> added;
    try {
      for (const auto& p : e_.registry_.pols(nonpolicy)) {
        if (std::find(sigma.begin(), sigma.end(), p) == sigma.end()) added.push_back(p);
      }
    } catch (const PolicyError& err) {
      throw EvaluationError(err.what());
    }
    // All policy programs must be present before the goal runs.
    if (auto s = ensure_programs(added, f)) return *s;
    sigma.insert(sigma.begin(), added.begin(), added.end());
  }

  ContextNode node{target, f.ctxseq};
  if (!e_.observers_.empty()) {
    ContextSwitchEvent ev{f.ctx, target, *f.sigma, sigma, context_sequence(&node)};
    for (Observer* o : e_.observers_) o->on_context_switch(ev);
  }
  Frame nf{&sigma, target, new_barrier(), f.anc, f.depth, &node};
  Signal s = prove(g, nf, k);
  if (s.kind == Signal::Cut && s.barrier == nf.cut_barrier) return Signal::next();
  return s;
}

// -------------------------------------------------------------- system calls

Signal Prover::run_builtin(const BuiltinSpec& spec, const Term& g, const Frame& f, Cont k) {
  BuiltinEvent ev{f.ctx, b_.resolve(g)};
  for (Observer* o : e_.observers_) {
    if (auto r = o->on_builtin(ev)) return stop_with(*r);
  }
  builtin_ctx_ = f.ctx.get();
  Signal s = spec.fn(*this, g, k);
  if (s.is_next() && cancelled()) return stop_with(TerminationReason::TimedOut);
  return s;
}

Signal Prover::system_call(const Term& g, const BuiltinSpec& spec, const Frame& f, Cont k) {
  const bool secure = e_.config_.security_enabled && !f.sigma->empty();
  if (!secure) {
    if (!is_policy_context(*f.ctx) && !e_.observers_.empty()) {
      SyscallEvent ev{b_.resolve(g), f.ctx, *f.sigma, context_sequence(f.ctxseq), true};
      for (Observer* o : e_.observers_) o->on_syscall(ev);
    }
    return run_builtin(spec, g, f, k);
  }
  static const PolicySet no_policies;
  ContextNode fresh{Expr::empty(), nullptr};
  Frame pf{&no_policies, Expr::empty(), 0, f.anc, f.depth, &fresh};

  Term check = Term::compound("#>", {expr_to_term(*policy_intersection(*f.sigma)),
                                     Term::compound("valid_systemCall", {b_.resolve(g)})});
  Once r = prove_once(check, pf);
  if (r == Once::Stopped) return Signal::stop();
  if (r == Once::NotFound) return Signal::next();

  if (!e_.observers_.empty()) {
    SyscallEvent ev{b_.resolve(g), f.ctx, *f.sigma, context_sequence(f.ctxseq), false};
    for (Observer* o : e_.observers_) o->on_syscall(ev);
  }
  Term invoke = Term::compound("#>", {f.sigma->back().to_term(), Term::compound("call_system", {g})});
  pf.cut_barrier = new_barrier();
  Signal s = prove(invoke, pf, k);
  if (s.kind == Signal::Cut && s.barrier == pf.cut_barrier) return Signal::next();
  return s;
}

Signal Prover::builtin_gate(const Term& g, const Frame& f, Cont k) {
  if (f.ctx->kind != Expr::Kind::Id || !e_.registry_.is_policy(*f.ctx->id)) return Signal::next();
  Term inner = b_.deref(g.arg(1));
  if (inner.is_functor("builtin", 1)) {
    return builtin_lookup(b_.deref(inner.arg(0))) ? k() : Signal::next();
  }
  if (inner.is_functor("call_builtin", 1)) {
    Term call = b_.deref(inner.arg(0));
    const BuiltinSpec* spec = builtin_lookup(call);
    if (!spec) return Signal::next();
    if (spec->mutates_program) {
      e_.host_.warn(to_string(b_.resolve(call)) + ": refused for delegated calls");
      return Signal::next();
    }
    return run_builtin(*spec, call, f, k);
  }
  const BuiltinSpec* spec = builtin_lookup(inner);
  if (!spec) return Signal::next();
  return run_builtin(*spec, inner, f, k);
}

// ------------------------------------------------------- core predicates

Number Prover::eval(const Term& t0) const {
  Term t = b_.deref(t0);
  if (t.is_integer()) return int_num(t.int_value());
  if (t.is_float()) return float_num(t.float_value());
  if (t.is_var()) throw EvaluationError("instantiation error in arithmetic");
  if (t.is_atom()) {
    if (t.name() == "pi") return float_num(M_PI);
    if (t.name() == "e") return float_num(M_E);
    throw EvaluationError("type error: not evaluable: " + t.name());
  }
  if (!t.is_compound()) throw EvaluationError("type error: not evaluable: " + to_string(t));
  const std::string& op = t.name();
  if (t.arity() == 1) {
    Number x = eval(t.arg(0));
    if (op == "-") return x.is_int ? int_num(-x.i) : float_num(-x.d);
    if (op == "+") return x;
    if (op == "abs") return x.is_int ? int_num(x.i < 0 ? -x.i : x.i) : float_num(std::fabs(x.d));
    if (op == "float") return float_num(x.as_double());
    if (op == "integer") return int_num(static_cast<std::int64_t>(std::llround(x.as_double())));
    if (op == "truncate") return int_num(static_cast<std::int64_t>(x.as_double()));
    if (op == "sqrt") return float_num(std::sqrt(x.as_double()));
  } else if (t.arity() == 2) {
    Number x = eval(t.arg(0));
    Number y = eval(t.arg(1));
    bool ints = x.is_int && y.is_int;
    if (op == "+") return ints ? int_num(x.i + y.i) : float_num(x.as_double() + y.as_double());
    if (op == "-") return ints ? int_num(x.i - y.i) : float_num(x.as_double() - y.as_double());
    if (op == "*") return ints ? int_num(x.i * y.i) : float_num(x.as_double() * y.as_double());
    if (op == "/") {
      if (ints) {
        if (y.i == 0) throw EvaluationError("evaluation error: zero divisor");
        if (x.i % y.i == 0) return int_num(x.i / y.i);
      }
      if (y.as_double() == 0) throw EvaluationError("evaluation error: zero divisor");
      return float_num(x.as_double() / y.as_double());
    }
    if (op == "//" || op == "mod") {
      if (!ints) throw EvaluationError("type error: integer expected in " + op);
      if (y.i == 0) throw EvaluationError("evaluation error: zero divisor");
      if (op == "//") return int_num(x.i / y.i);
      std::int64_t m = x.i % y.i;
      if (m != 0 && ((m < 0) != (y.i < 0))) m += y.i;
      return int_num(m);
    }
    if (op == "min") return compare_numbers(x, y) <= 0 ? x : y;
    if (op == "max") return compare_numbers(x, y) >= 0 ? x : y;
  }
  throw EvaluationError("type error: not evaluable: " + op + "/" + std::to_string(t.arity()));
}

std::optional<Signal> Prover::core(const Term& g, const Frame&, Cont k) {
  const std::string& n = g.name();
  const std::size_t ar = g.arity();
  if (ar == 1) {
    Term a = b_.deref(g.arg(0));
    std::optional<bool> test;
    if (n == "var") test = a.is_var();
    else if (n == "nonvar") test = !a.is_var();
    else if (n == "atom") test = a.is_atom();
    else if (n == "number") test = a.is_number();
    else if (n == "integer") test = a.is_integer();
    else if (n == "float") test = a.is_float();
    else if (n == "string") test = a.is_string();
    else if (n == "atomic") test = a.is_atomic();
    else if (n == "compound") test = a.is_compound();
    else if (n == "callable") test = a.is_callable();
    if (test) return *test ? k() : Signal::next();
    return std::nullopt;
  }
  if (ar == 2) {
    if (n == "=") return unify_then(g.arg(0), g.arg(1), k);
    if (n == "\\=") {
      auto m = b_.mark();
      bool ok = unify(g.arg(0), g.arg(1));
      b_.undo(m);
      return ok ? Signal::next() : k();
    }
    if (n == "==" || n == "\\==") {
      bool same = compare(b_.resolve(g.arg(0)), b_.resolve(g.arg(1))) == 0;
      return same == (n == "==") ? k() : Signal::next();
    }
    if (n == "is") return unify_then(g.arg(0), eval(g.arg(1)).term(), k);
    if (n == "=:=" || n == "=\\=" || n == "<" || n == ">" || n == "=<" || n == ">=") {
      int c = compare_numbers(eval(g.arg(0)), eval(g.arg(1)));
      bool ok = n == "=:=" ? c == 0 : n == "=\\=" ? c != 0 : n == "<" ? c < 0 : n == ">" ? c > 0 : n == "=<" ? c <= 0 : c >= 0;
      return ok ? k() : Signal::next();
    }
    if (n == "copy_term") return unify_then(g.arg(1), rename_apart(b_.resolve(g.arg(0))), k);
    if (n == "=..") {
      Term t = b_.deref(g.arg(0));
      if (!t.is_var()) {
        std::vector<Term> items;
        if (t.is_compound()) {
          items.push_back(Term::atom(t.name()));
          for (const auto& a : t.args()) items.push_back(a);
        } else {
          items.push_back(t);
        }
        return unify_then(g.arg(1), Term::list(items), k);
      }
      std::vector<Term> items;
      Term cur = b_.deref(g.arg(1));
      while (cur.is_functor(".", 2)) {
        items.push_back(b_.deref(cur.arg(0)));
        cur = b_.deref(cur.arg(1));
      }
      if (!cur.is_atom("[]") || items.empty()) throw EvaluationError("instantiation error in =..");
      if (items.size() == 1) return unify_then(t, items[0], k);
      if (!items[0].is_atom()) throw EvaluationError("type error: atom expected in =..");
      std::string f = items[0].name();
      items.erase(items.begin());
      return unify_then(t, Term::compound(f, std::move(items)), k);
    }
    return std::nullopt;
  }
  if (ar == 3) {
    if (n == "functor") {
      Term t = b_.deref(g.arg(0));
      if (!t.is_var()) {
        Term name = t.is_compound() ? Term::atom(t.name()) : t;
        auto m = b_.mark();
        Signal s = Signal::next();
        if (unify(g.arg(1), name) && unify(g.arg(2), Term::integer(static_cast<std::int64_t>(t.arity())))) s = k();
        b_.undo(m);
        return s;
      }
      Term name = b_.deref(g.arg(1));
      Term arity = b_.deref(g.arg(2));
      if (name.is_var() || !arity.is_integer()) throw EvaluationError("instantiation error in functor/3");
      if (arity.int_value() == 0) return unify_then(t, name, k);
      if (!name.is_atom()) throw EvaluationError("type error: atom expected in functor/3");
      std::vector<Term> args;
      for (std::int64_t i = 0; i < arity.int_value(); ++i) args.push_back(Term::variable());
      return unify_then(t, Term::compound(name.name(), std::move(args)), k);
    }
    if (n == "arg") {
      Term idx = b_.deref(g.arg(0));
      Term t = b_.deref(g.arg(1));
      if (!idx.is_integer() || !t.is_compound()) throw EvaluationError("instantiation error in arg/3");
      std::int64_t i = idx.int_value();
      if (i < 1 || static_cast<std::size_t>(i) > t.arity()) return Signal::next();
      return unify_then(g.arg(2), t.arg(static_cast<std::size_t>(i - 1)), k);
    }
  }
  return std::nullopt;
}

// ------------------------------------------------------------------ Engine

Engine::Engine(ProgramStore& store, PolicyRegistry& registry, Fetcher* fetcher, Host& host, EngineConfig config)
    : store_(store), registry_(registry), fetcher_(fetcher), host_(host), config_(config) {}

void Engine::remove_observer(Observer* o) {
  observers_.erase(std::remove(observers_.begin(), observers_.end(), o), observers_.end());
}

Engine::Outcome Engine::solve(const PolicySet& sigma, ExprPtr context, const Term& goal,
                              const SolutionFn& on_solution) {
  Outcome out;
  auto body = [&] {
    Prover prover(*this);
    ContextNode root{context, nullptr};
    Frame f{&sigma, context, prover.new_barrier(), nullptr, 0, &root};
    auto top = [&]() -> Signal {
      ++out.solutions;
      if (!on_solution(prover.bindings())) return Signal::stop();
      if (config_.max_solutions && out.solutions >= *config_.max_solutions) return Signal::stop();
      return Signal::next();
    };
    prover.prove(goal, f, top);
    out.terminated = prover.terminated;
    if (!out.terminated && cancel_ && cancel_->cancelled()) out.terminated = TerminationReason::TimedOut;
  };
  run_with_large_stack(body);
  return out;
}

Engine::Answers Engine::solve_all(const PolicySet& sigma, ExprPtr context, const Term& goal,
                                  std::optional<std::size_t> limit) {
  Answers a;
  std::vector<Term> vars = variables_of(goal);
  auto collect = [&](const Bindings& b) {
    Substitution s;
    for (const auto& v : vars) {
      Term value = b.resolve(v);
      if (!(value.is_var() && value.var_id() == v.var_id())) s.bind(v.var_id(), value);
    }
    a.answers.push_back(std::move(s));
    return !limit || a.answers.size() < *limit;
  };
  a.terminated = solve(sigma, std::move(context), goal, collect).terminated;
  return a;
}

bool Engine::succeeds(const PolicySet& sigma, ExprPtr context, const Term& goal) {
  return solve(sigma, std::move(context), goal, [](const Bindings&) { return false; }).solutions > 0;
}

}  // namespace logicweb
