#include "sarahbb/harness.hpp"

int main(int argc, char** argv) { return sarahbb::cli_main(argc, argv); }
