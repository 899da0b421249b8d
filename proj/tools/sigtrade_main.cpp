#include "sigtrade/cli.hpp"

int main(int argc, char** argv) { return sigtrade::cli::run(argc, argv); }
