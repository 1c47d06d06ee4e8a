#pragma once

#include <iosfwd>

namespace pruneclust {

/// Entry point behind the `pruneclust` executable. Returns 0 on success,
/// 2 on usage errors and 1 on data or validation errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pruneclust
