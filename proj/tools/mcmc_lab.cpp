#include "mcmc_lab/cli.hpp"

int main(int argc, char** argv) { return mcmc_lab::cli::main(argc, argv); }
