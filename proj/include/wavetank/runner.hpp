#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "wavetank/config.hpp"

namespace wavetank {

inline constexpr const char* kVersion = "0.1.0";

struct FileRecord {
  std::string path;  // relative to the output directory
  std::uint64_t bytes = 0;
  std::string fnv1a64;
};

struct TaskRecord {
  std::string name;
  bool ok = false;
  std::string error_kind;
  std::string error;
  double seconds = 0.0;
  std::vector<std::string> files;
};

struct RunManifest {
  nlohmann::json config;
  std::string version = kVersion;
  std::vector<TaskRecord> tasks;
  std::vector<FileRecord> files;

  bool ok() const;
  int exit_code() const { return ok() ? 0 : 1; }
  nlohmann::json to_json() const;
};

struct RunOptions {
  int workers = 1;
};

// Runs config.tasks in order into config.out and writes manifest.json there. A failing task is
// recorded and the rest still run.
RunManifest run(const ScenarioConfig& config, const RunOptions& opt = {});

// fn(i) for i in [0, n) on up to `workers` threads. Results must go into slots indexed by i.
// The first exception (lowest i) is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = std::clamp<std::size_t>(std::size_t(std::max(workers, 1)), 1, std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (w == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < w; ++k) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace wavetank
