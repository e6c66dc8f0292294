#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace meshsort {

/// Entry point of the `meshsort` tool. `args` excludes the program name.
/// Returns 0 on success, 2 on usage errors and 1 on any other failure.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace meshsort
