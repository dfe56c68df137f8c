#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hforge {

// args excludes the program name. Returns 0 on success or PASS, 1 on FAIL
// and 2 on usage, parse or input errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hforge
