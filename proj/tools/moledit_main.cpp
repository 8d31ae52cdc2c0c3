#include "moledit/cli.hpp"

int main(int argc, char** argv) { return moledit::run_cli(argc, argv); }
