#include "blowup/cli.hpp"

int main(int argc, char** argv) { return blowup::cli_main(argc, argv); }
