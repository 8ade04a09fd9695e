#include "maltls/cli.hpp"

int main(int argc, char** argv) { return maltls::cli_main(argc, argv); }
