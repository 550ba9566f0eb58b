#include "frmanova/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace frmanova {

int default_thread_count() {
  if (const char* env = std::getenv("FRMANOVA_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
      // Fall through to hardware concurrency on unparseable values.
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(int count, int threads,
                  const std::function<void(int begin, int end, int worker)>& body) {
  if (count <= 0) return;
  if (threads <= 0) threads = default_thread_count();
  if (threads > count) threads = count;

  if (threads == 1) {
    body(0, count, 0);
    return;
  }

  // Static contiguous partition: worker w gets [w*count/threads, (w+1)*count/threads).
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    const int begin = static_cast<int>(static_cast<long long>(count) * w / threads);
    const int end = static_cast<int>(static_cast<long long>(count) * (w + 1) / threads);
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end, w);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace frmanova
