#include "pqd/stack.hpp"

#include <pthread.h>

#include <exception>
#include <stdexcept>

namespace pqd {
namespace {

struct Job {
  const std::function<void()>* task;
  std::exception_ptr error;
};

void* trampoline(void* p) {
  auto* job = static_cast<Job*>(p);
  try {
    (*job->task)();
  } catch (...) {
    job->error = std::current_exception();
  }
  return nullptr;
}

}  // namespace

void run_with_stack(std::size_t bytes, const std::function<void()>& task) {
  Job job{&task, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, bytes);
  pthread_t th;
  int rc = pthread_create(&th, &attr, trampoline, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    // Could not reserve the stack; fall back to the caller's.
    task();
    return;
  }
  pthread_join(th, nullptr);
  if (job.error) std::rethrow_exception(job.error);
}

}  // namespace pqd
