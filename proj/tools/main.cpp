#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  return demo2prog::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
