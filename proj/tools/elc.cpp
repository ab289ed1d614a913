#include "elc/cli.hpp"

int main(int argc, char** argv) { return elc::run_cli(argc, argv); }
