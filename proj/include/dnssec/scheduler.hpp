#pragma once

#include <coroutine>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace dnssec {

/// Lazily started coroutine. Awaiting a Task runs it to completion and
/// resumes the awaiter by symmetric transfer.
template <class T>
class Task;

namespace detail {

struct PromiseBase {
  std::coroutine_handle<> continuation;
  std::exception_ptr error;

  std::suspend_always initial_suspend() noexcept { return {}; }

  struct FinalAwaiter {
    bool await_ready() noexcept { return false; }
    template <class P>
    std::coroutine_handle<> await_suspend(std::coroutine_handle<P> h) noexcept {
      auto next = h.promise().continuation;
      return next ? next : std::noop_coroutine();
    }
    void await_resume() noexcept {}
  };
  FinalAwaiter final_suspend() noexcept { return {}; }
  void unhandled_exception() { error = std::current_exception(); }
};

}  // namespace detail

template <class T>
class [[nodiscard]] Task {
 public:
  struct promise_type : detail::PromiseBase {
    std::optional<T> value;
    Task get_return_object() { return Task(std::coroutine_handle<promise_type>::from_promise(*this)); }
    void return_value(T v) { value = std::move(v); }
  };

  Task(Task&& o) noexcept : h_(std::exchange(o.h_, {})) {}
  Task& operator=(Task&& o) noexcept {
    if (this != &o) {
      if (h_) h_.destroy();
      h_ = std::exchange(o.h_, {});
    }
    return *this;
  }
  ~Task() {
    if (h_) h_.destroy();
  }

  bool await_ready() const noexcept { return false; }
  std::coroutine_handle<> await_suspend(std::coroutine_handle<> awaiter) noexcept {
    h_.promise().continuation = awaiter;
    return h_;
  }
  T await_resume() {
    if (h_.promise().error) std::rethrow_exception(h_.promise().error);
    return std::move(*h_.promise().value);
  }

  std::coroutine_handle<promise_type> handle() const { return h_; }

 private:
  explicit Task(std::coroutine_handle<promise_type> h) : h_(h) {}
  std::coroutine_handle<promise_type> h_;
};

template <>
class [[nodiscard]] Task<void> {
 public:
  struct promise_type : detail::PromiseBase {
    Task get_return_object() { return Task(std::coroutine_handle<promise_type>::from_promise(*this)); }
    void return_void() {}
  };

  Task(Task&& o) noexcept : h_(std::exchange(o.h_, {})) {}
  Task& operator=(Task&& o) noexcept {
    if (this != &o) {
      if (h_) h_.destroy();
      h_ = std::exchange(o.h_, {});
    }
    return *this;
  }
  ~Task() {
    if (h_) h_.destroy();
  }

  bool await_ready() const noexcept { return false; }
  std::coroutine_handle<> await_suspend(std::coroutine_handle<> awaiter) noexcept {
    h_.promise().continuation = awaiter;
    return h_;
  }
  void await_resume() {
    if (h_.promise().error) std::rethrow_exception(h_.promise().error);
  }

  std::coroutine_handle<promise_type> handle() const { return h_; }

 private:
  explicit Task(std::coroutine_handle<promise_type> h) : h_(h) {}
  std::coroutine_handle<promise_type> h_;
};

using ActivityId = int;
inline constexpr ActivityId kHarness = -1;

/// Deterministic interleaving scheduler.
///
/// Activities are grouped in phases; a phase starts once every activity of
/// the previous one has finished. Among ready coroutines the next one to run
/// is drawn from a seeded mt19937_64, which is the only source of
/// nondeterminism in a scenario.
class Scheduler {
 public:
  explicit Scheduler(std::uint64_t seed) : rng_(seed) {}

  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  ActivityId spawn(std::string name, int phase, std::function<Task<void>()> body);

  /// Runs until every activity finished. Throws BudgetExceeded when more
  /// than `max_steps` resumptions happen, and Error on deadlock.
  void run(std::size_t max_steps);

  ActivityId current() const { return current_; }
  const std::string& name_of(ActivityId id) const { return activities_.at(static_cast<std::size_t>(id)).name; }
  std::size_t activity_count() const { return activities_.size(); }
  std::size_t steps() const { return steps_; }

  /// Scheduler decision point; the caller is requeued.
  auto yield() {
    struct Awaiter {
      Scheduler& s;
      bool await_ready() const noexcept { return false; }
      void await_suspend(std::coroutine_handle<> h) { s.ready_.push_back({h, s.current_}); }
      void await_resume() const noexcept {}
    };
    return Awaiter{*this};
  }

  /// Parks the caller until `wake` hands it back via make_ready().
  auto park(std::function<void(std::coroutine_handle<>, ActivityId)> enqueue) {
    struct Awaiter {
      Scheduler& s;
      std::function<void(std::coroutine_handle<>, ActivityId)> enqueue;
      bool await_ready() const noexcept { return false; }
      void await_suspend(std::coroutine_handle<> h) { enqueue(h, s.current_); }
      void await_resume() const noexcept {}
    };
    return Awaiter{*this, std::move(enqueue)};
  }
  void make_ready(std::coroutine_handle<> h, ActivityId who) { ready_.push_back({h, who}); }

  /// Biased coin drawn from the scheduler's generator.
  bool choose(double probability);
  std::uint64_t draw(std::uint64_t bound);

  /// Called by the scheduler when activities start and finish.
  std::function<void(ActivityId, bool started)> on_activity;

 private:
  struct Activity {
    std::string name;
    int phase;
    std::function<Task<void>()> body;
    std::optional<Task<void>> task;
    bool finished = false;
  };
  struct Ready {
    std::coroutine_handle<> handle;
    ActivityId who;
  };

  void start_phase(int phase);

  std::mt19937_64 rng_;
  std::vector<Activity> activities_;
  std::vector<Ready> ready_;
  ActivityId current_ = kHarness;
  std::size_t steps_ = 0;
};

}  // namespace dnssec
