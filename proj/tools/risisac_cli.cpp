#include "risisac/harness.hpp"

int main(int argc, char** argv) { return risisac::cli_main(argc, argv); }
