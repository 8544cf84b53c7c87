#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "logicweb/control.hpp"
#include "logicweb/program.hpp"
#include "logicweb/term.hpp"

namespace logicweb {

// Runs system/1 commands.
class CommandRunner {
 public:
  virtual ~CommandRunner() = default;
  virtual int run(const std::string& command) = 0;
};

class ShellRunner : public CommandRunner {
 public:
  int run(const std::string& command) override;
};

// Records commands and reports a fixed exit status.
class RecordingRunner : public CommandRunner {
 public:
  explicit RecordingRunner(int status = 0) : status_(status) {}
  int run(const std::string& command) override {
    commands.push_back(command);
    return status_;
  }
  std::vector<std::string> commands;

 private:
  int status_;
};

// Open files addressed by '$stream'(N) handles.
class StreamTable {
 public:
  enum class Mode { Read, Write };
  std::optional<std::int64_t> open(const std::string& path, Mode mode);
  bool close(std::int64_t handle);
  bool write(std::int64_t handle, const std::string& text);
  std::optional<std::string> read_line(std::int64_t handle);
  std::size_t open_count() const { return streams_.size(); }
  void close_all() { streams_.clear(); }

 private:
  struct Stream {
    Mode mode;
    std::unique_ptr<std::fstream> file;
  };
  std::map<std::int64_t, Stream> streams_;
  std::int64_t next_ = 1;
};

// Host resources reachable from built-ins.
struct Host {
  std::ostream* out = &std::cout;
  StreamTable streams;
  std::shared_ptr<CommandRunner> commands = std::make_shared<ShellRunner>();
  std::vector<ProgramId> pending_deletes;
  std::vector<std::string> warnings;
  CancellationToken* cancel = nullptr;

  void warn(std::string text) { warnings.push_back(std::move(text)); }
  // False if interrupted.
  bool sleep_for(std::chrono::milliseconds d);
};

// What a built-in sees of the running derivation.
class BuiltinContext {
 public:
  virtual ~BuiltinContext() = default;
  virtual Term deref(const Term& t) const = 0;
  virtual Term resolve(const Term& t) const = 0;
  virtual bool unify(const Term& a, const Term& b) = 0;
  virtual Bindings::Mark mark() const = 0;
  virtual void undo(Bindings::Mark m) = 0;
  virtual Host& host() = 0;
  virtual ProgramStore& store() = 0;
  // The policy program whose clause list assert/retract may change, if any.
  virtual std::shared_ptr<LWProgram> writable_program() = 0;
};

// Built-ins are written in continuation-passing style and undo their own
// bindings before returning.
using BuiltinFn = Signal (*)(BuiltinContext& ctx, const Term& goal, Cont k);

struct BuiltinSpec {
  std::string name;
  std::size_t arity;
  BuiltinFn fn;
  bool mutates_program = false;  // assert/retract family
};

const std::vector<BuiltinSpec>& builtin_table();
const BuiltinSpec* builtin_lookup(const std::string& name, std::size_t arity);
const BuiltinSpec* builtin_lookup(const Term& goal);

Term stream_handle(std::int64_t n);
std::optional<std::int64_t> stream_number(const Term& t);

}  // namespace logicweb
