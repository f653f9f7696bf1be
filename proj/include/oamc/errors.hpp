#pragma once

#include <stdexcept>
#include <string>

namespace oamc {

// Base for every recoverable failure raised by the toolkit. The harness
// catches these per realization and records the class name in the status
// column.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define OAMC_DECLARE_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    using Error::Error;                                            \
    const char* kind() const noexcept override { return #Name; }   \
  }

OAMC_DECLARE_ERROR(UnresolvedMode);
OAMC_DECLARE_ERROR(GridMismatch);
OAMC_DECLARE_ERROR(DimensionMismatch);
OAMC_DECLARE_ERROR(InvalidCount);
OAMC_DECLARE_ERROR(AllBelowThreshold);
OAMC_DECLARE_ERROR(ZeroBlock);
OAMC_DECLARE_ERROR(RankAmbiguous);
OAMC_DECLARE_ERROR(ZeroPivot);
OAMC_DECLARE_ERROR(DegenerateColumn);
OAMC_DECLARE_ERROR(ZeroTrace);
OAMC_DECLARE_ERROR(FormatError);
OAMC_DECLARE_ERROR(ConfigError);

#undef OAMC_DECLARE_ERROR

class CaptureTooLow : public Error {
 public:
  CaptureTooLow(double captured, double floor)
      : Error("captured power " + std::to_string(captured) +
              " below floor " + std::to_string(floor)),
        captured_(captured) {}
  const char* kind() const noexcept override { return "CaptureTooLow"; }
  double captured() const noexcept { return captured_; }

 private:
  double captured_;
};

}  // namespace oamc
