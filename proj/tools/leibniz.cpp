#include "fl/harness/cli.hpp"

int main(int argc, char** argv) { return fl::harness::run_cli(argc, argv); }
