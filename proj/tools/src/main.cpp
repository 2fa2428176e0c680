#include "rusgate/cli.hpp"

int main(int argc, char** argv) { return rusgate::cli::main(argc, argv); }
