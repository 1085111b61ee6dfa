#pragma once

#include <stdexcept>
#include <string>

namespace gqfi {

// Base for all domain errors. `code()` is a stable machine-readable name
// used by the CLI for exit reporting.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define GQFI_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                  \
    public:                                                      \
        explicit Name(const std::string& what) : Error(#Name, what) {} \
    }

GQFI_DEFINE_ERROR(NonPsdM);
GQFI_DEFINE_ERROR(UncertaintyViolation);
GQFI_DEFINE_ERROR(SingularCovariance);
GQFI_DEFINE_ERROR(DefectiveDrift);
GQFI_DEFINE_ERROR(WrongClass);
GQFI_DEFINE_ERROR(DegenerateGap);
GQFI_DEFINE_ERROR(WrongBlockStructure);
GQFI_DEFINE_ERROR(AllGapsDegenerate);
GQFI_DEFINE_ERROR(InvalidHopping);
GQFI_DEFINE_ERROR(CutoffExceeded);
GQFI_DEFINE_ERROR(IllConditioned);
GQFI_DEFINE_ERROR(UnstableModel);
GQFI_DEFINE_ERROR(PtBroken);
GQFI_DEFINE_ERROR(ConfigError);
GQFI_DEFINE_ERROR(NumericsError);

#undef GQFI_DEFINE_ERROR

}  // namespace gqfi
