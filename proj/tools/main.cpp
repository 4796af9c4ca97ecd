#include "hfvol/cli.hpp"

int main(int argc, char** argv) { return hfvol::cli::run(argc, argv); }
