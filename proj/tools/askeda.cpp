#include "askeda/cli.hpp"

int main(int argc, char** argv) { return askeda::cli::run(argc, argv); }
