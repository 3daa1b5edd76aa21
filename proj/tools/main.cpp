#include "csisim/cli.hpp"

int main(int argc, char** argv) { return csisim::run_cli(argc, argv); }
