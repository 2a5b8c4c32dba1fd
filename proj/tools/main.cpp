#include "lorasim/cli.hpp"

int main(int argc, char** argv) { return lorasim::cli::run(argc, argv); }
