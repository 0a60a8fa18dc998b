// Copyright 2026 The DLIC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dlic/thread_pool.h"

#include <algorithm>

namespace dlic {
namespace {

std::pair<size_t, size_t> ChunkBounds(size_t n, unsigned parts,
                                      unsigned index) {
  const size_t base = n / parts;
  const size_t extra = n % parts;
  const size_t begin = index * base + std::min<size_t>(index, extra);
  const size_t len = base + (index < extra ? 1 : 0);
  return {begin, begin + len};
}

}  // namespace

ThreadPool::ThreadPool(unsigned workers) : workers_(std::max(1u, workers)) {
  for (unsigned i = 1; i < workers_; ++i) {
    threads_.emplace_back([this, i] { WorkerLoop(i); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  start_cv_.notify_all();
  threads_.clear();  // join before the mutex goes away
}

void ThreadPool::WorkerLoop(unsigned index) {
  size_t seen = 0;
  for (;;) {
    const std::function<void(size_t, size_t)>* body;
    size_t n;
    {
      std::unique_lock lock(mu_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      body = body_;
      n = n_;
    }
    const auto [begin, end] = ChunkBounds(n, workers_, index);
    std::exception_ptr err;
    if (begin < end) {
      try {
        (*body)(begin, end);
      } catch (...) {
        err = std::current_exception();
      }
    }
    {
      std::lock_guard lock(mu_);
      if (err && !error_) error_ = err;
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }
}

void ThreadPool::ParallelFor(
    size_t n, const std::function<void(size_t begin, size_t end)>& body) {
  if (n == 0) return;
  if (workers_ == 1 || n == 1) {
    body(0, n);
    return;
  }
  {
    std::lock_guard lock(mu_);
    body_ = &body;
    n_ = n;
    pending_ = workers_ - 1;
    error_ = nullptr;
    ++generation_;
  }
  start_cv_.notify_all();

  std::exception_ptr own_error;
  const auto [begin, end] = ChunkBounds(n, workers_, 0);
  try {
    if (begin < end) body(begin, end);
  } catch (...) {
    own_error = std::current_exception();
  }

  std::unique_lock lock(mu_);
  done_cv_.wait(lock, [&] { return pending_ == 0; });
  body_ = nullptr;
  if (own_error) std::rethrow_exception(own_error);
  if (error_) std::rethrow_exception(error_);
}

}  // namespace dlic
