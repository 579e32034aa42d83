#include "avdiv/cli.hpp"

int main(int argc, char** argv) { return avdiv::cli::run(argc, argv); }
