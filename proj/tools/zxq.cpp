#include "zxq/cli.hpp"

int main(int argc, char** argv) { return zxq::cli::run(argc, argv); }
