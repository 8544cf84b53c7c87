#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <type_traits>
#include <utility>

namespace logicweb {

// Result of a proof step in continuation-passing style.
//   Next: no (more) solutions here, keep backtracking.
//   Stop: abandon the whole search (consumer satisfied or a guard fired).
//   Cut:  prune choice points up to the call that owns `barrier`.
struct Signal {
  enum Kind : std::uint8_t { Next, Stop, Cut };
  Kind kind = Next;
  std::uint64_t barrier = 0;

  static Signal next() { return {Next, 0}; }
  static Signal stop() { return {Stop, 0}; }
  static Signal cut(std::uint64_t b) { return {Cut, b}; }
  bool is_next() const { return kind == Next; }
};

// Non-owning reference to a callable; the callable must outlive the call.
template <typename Sig>
class FunctionRef;

template <typename R, typename... A>
class FunctionRef<R(A...)> {
 public:
  template <typename F, typename = std::enable_if_t<!std::is_same_v<std::decay_t<F>, FunctionRef>>>
  FunctionRef(F&& f)  // NOLINT(google-explicit-constructor)
      : obj_(const_cast<void*>(static_cast<const void*>(std::addressof(f)))),
        call_([](void* o, A... a) -> R { return (*static_cast<std::remove_reference_t<F>*>(o))(std::forward<A>(a)...); }) {}

  R operator()(A... a) const { return call_(obj_, std::forward<A>(a)...); }

 private:
  void* obj_;
  R (*call_)(void*, A...);
};

using Cont = FunctionRef<Signal()>;

// Cooperative cancellation shared between a watchdog and a derivation.
class CancellationToken {
 public:
  void cancel() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      cancelled_.store(true);
    }
    cv_.notify_all();
  }
  bool cancelled() const { return cancelled_.load(std::memory_order_relaxed); }
  void reset() { cancelled_.store(false); }

  // Sleeps up to `d`; returns false if cancelled first.
  template <typename Rep, typename Period>
  bool sleep_for(std::chrono::duration<Rep, Period> d) {
    std::unique_lock<std::mutex> lock(mu_);
    return !cv_.wait_for(lock, d, [&] { return cancelled_.load(); });
  }

 private:
  std::atomic<bool> cancelled_{false};
  std::mutex mu_;
  std::condition_variable cv_;
};

}  // namespace logicweb
