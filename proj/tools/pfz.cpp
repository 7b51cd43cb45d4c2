#include "pfz/cli.hpp"

int main(int argc, char** argv)
{
  return pfz::cli::run(argc, argv);
}
