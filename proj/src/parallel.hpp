#pragma once

#include <exception>

namespace cobo::detail {

// Holds the first exception thrown inside an OpenMP region so it can be
// rethrown after the region ends; exceptions must not cross the region edge.
class ExceptionSlot {
 public:
  template <class F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
#pragma omp critical(cobo_exception_slot)
      if (!error_) error_ = std::current_exception();
    }
  }

  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

}  // namespace cobo::detail
