#include "triplateau/cli.hpp"

int main(int argc, char** argv) { return triplateau::run_cli(argc, argv); }
