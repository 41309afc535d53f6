#include "gcsieve/scenarios.hpp"

int main(int argc, char** argv) { return gcsieve::run_cli(argc, argv); }
