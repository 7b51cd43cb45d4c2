#ifndef PFZ_CLI_HPP
#define PFZ_CLI_HPP

#include <string>
#include <vector>

namespace pfz::cli
{
  //! exit codes: 0 ok, 1 invalid input, 2 numerical failure
  int run(int argc, char** argv);

  //! same, with argv[0] supplied internally
  int run(const std::vector<std::string>& args);
}

#endif // PFZ_CLI_HPP
