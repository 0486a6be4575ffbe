#include "priceopt/cli.hpp"

int main(int argc, char** argv) { return priceopt::cli::run(argc, argv); }
