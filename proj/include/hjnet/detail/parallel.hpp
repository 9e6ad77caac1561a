#pragma once

#include <exception>

namespace hjnet::detail {

// Exceptions must not leave an OpenMP region. Loop bodies call run(); the first
// captured exception is rethrown after the region closes.
class ExceptionSlot {
 public:
  template <class F>
  void run(F&& body) noexcept {
    try {
      body();
    } catch (...) {
#pragma omp critical(hjnet_exception_slot)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

}  // namespace hjnet::detail
