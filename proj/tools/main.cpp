#include "vq/cli.hpp"

int main(int argc, char** argv) { return vq::cli_main(argc, argv); }
