#include "dnssec/scheduler.hpp"

#include <algorithm>
#include <set>

#include "dnssec/errors.hpp"

namespace dnssec {

ActivityId Scheduler::spawn(std::string name, int phase, std::function<Task<void>()> body) {
  activities_.push_back(Activity{std::move(name), phase, std::move(body), std::nullopt, false});
  return static_cast<ActivityId>(activities_.size() - 1);
}

bool Scheduler::choose(double probability) {
  if (probability <= 0.0) return false;
  if (probability >= 1.0) return true;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < probability;
}

std::uint64_t Scheduler::draw(std::uint64_t bound) {
  if (bound <= 1) return 0;
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng_);
}

void Scheduler::start_phase(int phase) {
  for (std::size_t i = 0; i < activities_.size(); ++i) {
    auto& a = activities_[i];
    if (a.phase != phase) continue;
    a.task.emplace(a.body());
    ready_.push_back({a.task->handle(), static_cast<ActivityId>(i)});
    if (on_activity) on_activity(static_cast<ActivityId>(i), true);
  }
}

void Scheduler::run(std::size_t max_steps) {
  std::set<int> phases;
  for (const auto& a : activities_) phases.insert(a.phase);

  for (int phase : phases) {
    start_phase(phase);
    while (true) {
      for (std::size_t i = 0; i < activities_.size(); ++i) {
        auto& a = activities_[i];
        if (a.phase != phase || a.finished || !a.task || !a.task->handle().done()) continue;
        a.finished = true;
        if (on_activity) on_activity(static_cast<ActivityId>(i), false);
        a.task->await_resume();  // rethrows a failure of the activity
      }
      const bool pending = std::any_of(activities_.begin(), activities_.end(), [&](const Activity& a) {
        return a.phase == phase && !a.finished;
      });
      if (!pending) break;
      if (ready_.empty()) throw Error("deadlock: no runnable activity");
      if (++steps_ > max_steps) {
        throw BudgetExceeded("step budget of " + std::to_string(max_steps) + " exhausted");
      }
      const auto pick = static_cast<std::size_t>(draw(ready_.size()));
      Ready next = ready_[pick];
      ready_.erase(ready_.begin() + static_cast<std::ptrdiff_t>(pick));
      current_ = next.who;
      next.handle.resume();
      current_ = kHarness;
    }
  }
}

}  // namespace dnssec
