#include <string>
#include <vector>

#include "mindgauge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mindgauge::dispatch(args);
}
