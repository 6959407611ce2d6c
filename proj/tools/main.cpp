#include "cli.hpp"

int main(int argc, char **argv) { return rcdamage::cli::run(argc, argv); }
