#include "mamprop/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace mamprop {

namespace {
std::atomic<unsigned> g_jobs{1};
thread_local bool t_in_parallel = false;
}  // namespace

void set_max_jobs(unsigned jobs) { g_jobs = std::max(1u, jobs); }
unsigned max_jobs() { return g_jobs.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(max_jobs(), n);
  if (workers <= 1 || t_in_parallel) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    t_in_parallel = true;
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    t_in_parallel = false;
  };
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace mamprop
