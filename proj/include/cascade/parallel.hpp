#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <future>
#include <string>
#include <thread>
#include <vector>

namespace cascade {

// Worker cap: hardware concurrency, clamped by CASCADE_DIM_THREADS.
inline unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CASCADE_DIM_THREADS")) {
    try {
      long v = std::stol(env);
      // An explicit setting wins over the detected core count, so worker
      // counts stay reproducible across machines.
      if (v >= 1 && v <= 4096) hw = static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return hw;
}

// Apply fn to every input, fanning out across at most thread_cap() workers.
// Results come back in input order, so the output cannot depend on the
// number of workers.
template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& inputs, Fn fn)
    -> std::vector<decltype(fn(inputs.front()))> {
  using Out = decltype(fn(inputs.front()));
  std::vector<Out> out(inputs.size());
  unsigned workers = std::min<std::size_t>(thread_cap(), inputs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < inputs.size(); ++i) out[i] = fn(inputs[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> tasks;
  tasks.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next.fetch_add(1); i < inputs.size(); i = next.fetch_add(1))
        out[i] = fn(inputs[i]);
    }));
  }
  for (auto& t : tasks) t.get();
  return out;
}

}  // namespace cascade
