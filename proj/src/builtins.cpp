#include "logicweb/builtins.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <thread>

#include "logicweb/syntax.hpp"

namespace logicweb {

int ShellRunner::run(const std::string& command) {
  int status = std::system(command.c_str());
  return status;
}

bool Host::sleep_for(std::chrono::milliseconds d) {
  if (cancel) return cancel->sleep_for(d);
  std::this_thread::sleep_for(d);
  return true;
}

std::optional<std::int64_t> StreamTable::open(const std::string& path, Mode mode) {
  auto flags = mode == Mode::Read ? std::ios::in : (std::ios::out | std::ios::trunc);
  auto file = std::make_unique<std::fstream>(path, flags);
  if (!file->is_open()) return std::nullopt;
  std::int64_t h = next_++;
  streams_.emplace(h, Stream{mode, std::move(file)});
  return h;
}

bool StreamTable::close(std::int64_t handle) { return streams_.erase(handle) != 0; }

bool StreamTable::write(std::int64_t handle, const std::string& text) {
  auto it = streams_.find(handle);
  if (it == streams_.end() || it->second.mode != Mode::Write) return false;
  *it->second.file << text;
  it->second.file->flush();
  return static_cast<bool>(*it->second.file);
}

std::optional<std::string> StreamTable::read_line(std::int64_t handle) {
  auto it = streams_.find(handle);
  if (it == streams_.end() || it->second.mode != Mode::Read) return std::nullopt;
  std::string line;
  if (!std::getline(*it->second.file, line)) return std::nullopt;
  return line;
}

Term stream_handle(std::int64_t n) { return Term::compound("$stream", {Term::integer(n)}); }

std::optional<std::int64_t> stream_number(const Term& t) {
  if (t.is_functor("$stream", 1) && t.arg(0).is_integer()) return t.arg(0).int_value();
  return std::nullopt;
}

namespace {

// Unify and continue once.
Signal unify_then(BuiltinContext& c, const Term& a, const Term& b, Cont k) {
  auto m = c.mark();
  Signal s = Signal::next();
  if (c.unify(a, b)) s = k();
  c.undo(m);
  return s;
}

Signal fail_with(BuiltinContext& c, const Term& goal, const std::string& why) {
  c.host().warn(to_string(c.resolve(goal)) + ": " + why);
  return Signal::next();
}

std::optional<std::vector<Term>> proper_list(const Term& t, const BuiltinContext& c) {
  std::vector<Term> items;
  Term cur = c.deref(t);
  while (cur.is_functor(".", 2)) {
    items.push_back(cur.arg(0));
    cur = c.deref(cur.arg(1));
  }
  if (!cur.is_atom("[]")) return std::nullopt;
  return items;
}

Term text_like(const Term& model, std::string text) {
  return model.is_atom() ? Term::atom(text) : Term::string(std::move(text));
}

// Strings and atoms other than the empty list.
bool chars(const Term& t) { return t.is_text() && !t.is_atom("[]"); }

std::string display_text(const Term& t) { return t.is_text() ? t.text() : to_string(t); }

// ------------------------------------------------------------------ streams

Signal bi_open(BuiltinContext& c, const Term& g, Cont k) {
  Term file = c.deref(g.arg(0));
  Term mode = c.deref(g.arg(1));
  Term stream = c.deref(g.arg(2));
  if (!file.is_atom()) return fail_with(c, g, "file name must be an atom");
  if (!mode.is_atom("read") && !mode.is_atom("write")) return fail_with(c, g, "mode must be read or write");
  if (!stream.is_var()) return fail_with(c, g, "stream must be a variable");
  auto h = c.host().streams.open(file.name(), mode.is_atom("read") ? StreamTable::Mode::Read : StreamTable::Mode::Write);
  if (!h) return fail_with(c, g, "cannot open " + file.name());
  return unify_then(c, stream, stream_handle(*h), k);
}

Signal bi_close(BuiltinContext& c, const Term& g, Cont k) {
  auto h = stream_number(c.resolve(g.arg(0)));
  if (!h) return fail_with(c, g, "not a stream");
  if (!c.host().streams.close(*h)) return fail_with(c, g, "stream not open");
  return k();
}

Signal bi_write2(BuiltinContext& c, const Term& g, Cont k) {
  auto h = stream_number(c.resolve(g.arg(0)));
  if (!h) return fail_with(c, g, "not a stream");
  if (!c.host().streams.write(*h, display_text(c.resolve(g.arg(1))))) return fail_with(c, g, "write failed");
  return k();
}

Signal bi_read_line(BuiltinContext& c, const Term& g, Cont k) {
  auto h = stream_number(c.resolve(g.arg(0)));
  if (!h) return fail_with(c, g, "not a stream");
  auto line = c.host().streams.read_line(*h);
  return unify_then(c, g.arg(1), line ? Term::string(*line) : Term::atom("end_of_file"), k);
}

// ------------------------------------------------------------------- system

Signal bi_system(BuiltinContext& c, const Term& g, Cont k) {
  Term cmd = c.deref(g.arg(0));
  if (!cmd.is_text()) return fail_with(c, g, "command must be text");
  if (c.host().commands->run(cmd.text()) != 0) return Signal::next();
  return k();
}

Signal bi_sleep(BuiltinContext& c, const Term& g, Cont k) {
  Term t = c.deref(g.arg(0));
  if (!t.is_number()) return fail_with(c, g, "duration must be a number");
  double secs = t.is_integer() ? static_cast<double>(t.int_value()) : t.float_value();
  if (secs < 0) secs = 0;
  if (!c.host().sleep_for(std::chrono::milliseconds(static_cast<std::int64_t>(secs * 1000)))) return Signal::next();
  return k();
}

Signal bi_display(BuiltinContext& c, const Term& g, Cont k) {
  *c.host().out << display_text(c.resolve(g.arg(0)));
  c.host().out->flush();
  return k();
}

Signal bi_nl(BuiltinContext& c, const Term&, Cont k) {
  *c.host().out << '\n';
  c.host().out->flush();
  return k();
}

// ---------------------------------------------------------- dynamic clauses

Signal do_assert(BuiltinContext& c, const Term& g, Cont k, bool front) {
  auto prog = c.writable_program();
  if (!prog) return fail_with(c, g, "no writable program in this context");
  Term t = c.resolve(g.arg(0));
  Clause clause;
  try {
    clause = Clause::from_term(t);
  } catch (const std::exception& e) {
    return fail_with(c, g, e.what());
  }
  if (front) {
    prog->add_front(std::move(clause));
  } else {
    prog->add_back(std::move(clause));
  }
  return k();
}

Signal bi_asserta(BuiltinContext& c, const Term& g, Cont k) { return do_assert(c, g, k, true); }
Signal bi_assertz(BuiltinContext& c, const Term& g, Cont k) { return do_assert(c, g, k, false); }

Signal bi_retract(BuiltinContext& c, const Term& g, Cont k) {
  auto prog = c.writable_program();
  if (!prog) return fail_with(c, g, "no writable program in this context");
  Term t = c.deref(g.arg(0));
  Term head = t;
  Term body = Term::atom("true");
  if (t.is_functor(":-", 2)) {
    head = t.arg(0);
    body = t.arg(1);
  }
  auto clauses = prog->snapshot();
  for (std::size_t i = 0; i < clauses->size(); ++i) {
    Term cl = rename_apart(Term::compound(":-", {(*clauses)[i].head, (*clauses)[i].body}));
    auto m = c.mark();
    if (c.unify(head, cl.arg(0)) && c.unify(body, cl.arg(1))) {
      prog->remove_at(i);
      Signal s = k();
      c.undo(m);
      return s;
    }
    c.undo(m);
  }
  return Signal::next();
}

// -------------------------------------------------------------------- text

Signal bi_contains(BuiltinContext& c, const Term& g, Cont k) {
  Term a = c.deref(g.arg(0));
  Term b = c.deref(g.arg(1));
  if (!a.is_text() || !b.is_text()) return Signal::next();
  if (a.text().find(b.text()) == std::string::npos) return Signal::next();
  return k();
}

Signal list_append(BuiltinContext& c, const Term& a, const Term& b, const Term& r, Cont k) {
  Term da = c.deref(a);
  // append([], B, B).
  {
    auto m = c.mark();
    Signal s = Signal::next();
    if (c.unify(da, Term::nil()) && c.unify(b, r)) s = k();
    c.undo(m);
    if (!s.is_next()) return s;
  }
  // append([H|T], B, [H|R]) :- append(T, B, R).
  Term h = Term::variable();
  Term t = Term::variable();
  Term rest = Term::variable();
  auto m = c.mark();
  Signal s = Signal::next();
  if (c.unify(da, Term::compound(".", {h, t})) && c.unify(r, Term::compound(".", {h, rest}))) {
    s = list_append(c, t, b, rest, k);
  }
  c.undo(m);
  return s;
}

Signal bi_append(BuiltinContext& c, const Term& g, Cont k) {
  Term a = c.deref(g.arg(0));
  Term b = c.deref(g.arg(1));
  Term r = c.deref(g.arg(2));
  if (chars(a) && chars(r)) {
    const std::string& whole = r.text();
    if (whole.compare(0, a.text().size(), a.text()) != 0 || whole.size() < a.text().size()) return Signal::next();
    return unify_then(c, b, text_like(r, whole.substr(a.text().size())), k);
  }
  if (chars(a) && chars(b) && r.is_var()) return unify_then(c, r, text_like(a, a.text() + b.text()), k);
  if (a.is_var() && chars(b) && chars(r)) {
    const std::string& whole = r.text();
    const std::string& tail = b.text();
    if (whole.size() < tail.size() || whole.compare(whole.size() - tail.size(), tail.size(), tail) != 0) {
      return Signal::next();
    }
    return unify_then(c, a, text_like(r, whole.substr(0, whole.size() - tail.size())), k);
  }
  if (chars(a) || chars(r)) return Signal::next();
  return list_append(c, a, b, r, k);
}

Signal bi_member(BuiltinContext& c, const Term& g, Cont k) {
  Term cur = c.deref(g.arg(1));
  while (cur.is_functor(".", 2)) {
    auto m = c.mark();
    Signal s = Signal::next();
    if (c.unify(g.arg(0), cur.arg(0))) s = k();
    c.undo(m);
    if (!s.is_next()) return s;
    cur = c.deref(cur.arg(1));
  }
  return Signal::next();
}

Signal bi_length(BuiltinContext& c, const Term& g, Cont k) {
  if (auto items = proper_list(g.arg(0), c)) {
    return unify_then(c, g.arg(1), Term::integer(static_cast<std::int64_t>(items->size())), k);
  }
  Term l = c.deref(g.arg(0));
  Term n = c.deref(g.arg(1));
  if (l.is_var() && n.is_integer() && n.int_value() >= 0) {
    std::vector<Term> vars;
    for (std::int64_t i = 0; i < n.int_value(); ++i) vars.push_back(Term::variable());
    return unify_then(c, l, Term::list(vars), k);
  }
  return Signal::next();
}

Signal bi_atom_string(BuiltinContext& c, const Term& g, Cont k) {
  Term a = c.deref(g.arg(0));
  if (a.is_atom()) return unify_then(c, g.arg(1), Term::string(a.name()), k);
  if (a.is_number()) return unify_then(c, g.arg(1), Term::string(to_string(a)), k);
  Term s = c.deref(g.arg(1));
  if (a.is_var() && s.is_text()) return unify_then(c, a, Term::atom(s.text()), k);
  return fail_with(c, g, "instantiation error");
}

Signal bi_number_string(BuiltinContext& c, const Term& g, Cont k) {
  Term n = c.deref(g.arg(0));
  if (n.is_number()) return unify_then(c, g.arg(1), Term::string(to_string(n)), k);
  Term s = c.deref(g.arg(1));
  if (!s.is_text()) return fail_with(c, g, "instantiation error");
  try {
    ReadTerm rt = read_term(s.text() + " .");
    if (!rt.term.is_number()) return Signal::next();
    return unify_then(c, n, rt.term, k);
  } catch (const std::exception&) {
    return Signal::next();
  }
}

Signal bi_string_concat(BuiltinContext& c, const Term& g, Cont k) {
  Term a = c.deref(g.arg(0));
  Term b = c.deref(g.arg(1));
  if (!a.is_text() || !b.is_text()) return fail_with(c, g, "instantiation error");
  return unify_then(c, g.arg(2), Term::string(a.text() + b.text()), k);
}

// ------------------------------------------------------------------- store

Signal bi_program_exists(BuiltinContext& c, const Term& g, Cont k) {
  auto id = ProgramId::from_term(c.resolve(g.arg(0)));
  if (!id || !c.store().contains(*id)) return Signal::next();
  return k();
}

Signal bi_delete_program(BuiltinContext& c, const Term& g, Cont k) {
  auto id = ProgramId::from_term(c.resolve(g.arg(0)));
  if (!id) return fail_with(c, g, "not a program identifier");
  c.host().pending_deletes.push_back(*id);
  return k();
}

}  // namespace

const std::vector<BuiltinSpec>& builtin_table() {
  static const std::vector<BuiltinSpec> table = {
      {"open", 3, bi_open},
      {"close", 1, bi_close},
      {"write", 2, bi_write2},
      {"read_line", 2, bi_read_line},
      {"system", 1, bi_system},
      {"assert", 1, bi_assertz, true},
      {"asserta", 1, bi_asserta, true},
      {"assertz", 1, bi_assertz, true},
      {"retract", 1, bi_retract, true},
      {"contains", 2, bi_contains},
      {"append", 3, bi_append},
      {"member", 2, bi_member},
      {"length", 2, bi_length},
      {"program_exists", 1, bi_program_exists},
      {"delete_program", 1, bi_delete_program},
      {"display", 1, bi_display},
      {"write", 1, bi_display},
      {"nl", 0, bi_nl},
      {"sleep", 1, bi_sleep},
      {"atom_string", 2, bi_atom_string},
      {"number_string", 2, bi_number_string},
      {"string_concat", 3, bi_string_concat},
  };
  return table;
}

const BuiltinSpec* builtin_lookup(const std::string& name, std::size_t arity) {
  for (const auto& b : builtin_table()) {
    if (b.arity == arity && b.name == name) return &b;
  }
  return nullptr;
}

const BuiltinSpec* builtin_lookup(const Term& goal) {
  if (goal.is_atom()) return builtin_lookup(goal.name(), 0);
  if (goal.is_compound()) return builtin_lookup(goal.name(), goal.arity());
  return nullptr;
}

}  // namespace logicweb
