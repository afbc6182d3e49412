#pragma once

#include <stdexcept>
#include <string>

namespace brownscope {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "Error"; }
};

#define BROWNSCOPE_ERROR(Name)                                         \
    class Name : public Error {                                        \
    public:                                                            \
        explicit Name(const std::string& what) : Error(what) {}        \
        const char* kind() const noexcept override { return #Name; }   \
    };

// measure_core
BROWNSCOPE_ERROR(InvalidMeasure)
BROWNSCOPE_ERROR(EvaluationOnSupport)
BROWNSCOPE_ERROR(NegativeEpsilon)
BROWNSCOPE_ERROR(WrongSupportKind)
// hj_additive / hj_multiplicative
BROWNSCOPE_ERROR(LifetimeExceeded)
BROWNSCOPE_ERROR(InversionFailed)
BROWNSCOPE_ERROR(InsideDomain)
BROWNSCOPE_ERROR(OriginExcluded)
BROWNSCOPE_ERROR(ContinuationFailed)
BROWNSCOPE_ERROR(BadGamma)
// rdiagonal
BROWNSCOPE_ERROR(OutsideOmega)
BROWNSCOPE_ERROR(TMaxExceeded)
// region
BROWNSCOPE_ERROR(MapError)
BROWNSCOPE_ERROR(FormatError)
// cli
BROWNSCOPE_ERROR(ConfigError)

#undef BROWNSCOPE_ERROR

/// Raised when the momentum of a Hamilton flow diverges before the requested time.
class BlowUp : public Error {
public:
    BlowUp(const std::string& what, double t_detected)
        : Error(what), t_detected_(t_detected) {}
    const char* kind() const noexcept override { return "BlowUp"; }
    double t_detected() const noexcept { return t_detected_; }

private:
    double t_detected_;
};

}  // namespace brownscope
