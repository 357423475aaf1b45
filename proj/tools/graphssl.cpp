#include "cli.hpp"

int main(int argc, char** argv) { return graphssl::cli::run(argc, argv); }
